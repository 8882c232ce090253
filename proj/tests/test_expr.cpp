#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "polarmap/expr.hpp"

using namespace polarmap;

namespace {

double value(const ExprPtr& e, double x1, double x2) {
    return eval_expr_value(*e, x1, x2);
}

// random well-formed tree for round-trip property tests; stays inside the
// parser's image, where negation is a node and literals are non-negative
ExprPtr random_tree(oracles::Rng& rng, int depth) {
    if (depth <= 0 || rng.integer(0, 3) == 0) {
        if (rng.integer(0, 1) == 0) return Expr::constant(rng.uniform(0.0, 4.0));
        return Expr::variable(rng.integer(0, 1));
    }
    switch (rng.integer(0, 6)) {
        case 0:
            return Expr::binary(BinaryOp::Add, random_tree(rng, depth - 1),
                                random_tree(rng, depth - 1));
        case 1:
            return Expr::binary(BinaryOp::Sub, random_tree(rng, depth - 1),
                                random_tree(rng, depth - 1));
        case 2:
            return Expr::binary(BinaryOp::Mul, random_tree(rng, depth - 1),
                                random_tree(rng, depth - 1));
        case 3:
            return Expr::binary(BinaryOp::Div, random_tree(rng, depth - 1),
                                random_tree(rng, depth - 1));
        case 4:
            return Expr::unary(static_cast<UnaryOp>(rng.integer(0, 4)),
                               random_tree(rng, depth - 1));
        case 5:
            return Expr::power(random_tree(rng, depth - 1), rng.integer(-3, 5),
                               1);
        default:
            return Expr::power(random_tree(rng, depth - 1), rng.integer(1, 5),
                               rng.integer(2, 4));
    }
}

}  // namespace

TEST_CASE("precedence: products bind tighter than sums, powers tightest") {
    CHECK(value(parse_expression("2+3*4"), 0, 0) == 14.0);
    CHECK(value(parse_expression("2*3^2"), 0, 0) == 18.0);
    CHECK(value(parse_expression("-2^2"), 0, 0) == -4.0);
    CHECK(value(parse_expression("(2+3)*4"), 0, 0) == 20.0);
    CHECK(value(parse_expression("2-3-4"), 0, 0) == -5.0);
    CHECK(value(parse_expression("12/3/2"), 0, 0) == 2.0);
    CHECK(value(parse_expression("pi"), 0, 0) ==
          Catch::Approx(3.14159265358979323846));
}

TEST_CASE("variables and functions evaluate") {
    CHECK(value(parse_expression("x1 + 2*x2"), 1.0, 2.5) == 6.0);
    CHECK(value(parse_expression("sin(x1)^2 + cos(x1)^2"), 0.77, 0.0) ==
          Catch::Approx(1.0));
    CHECK(value(parse_expression("sqrt(x1)"), 9.0, 0.0) == 3.0);
    CHECK(value(parse_expression("log(x1)"), 1.0, 0.0) == 0.0);
}

TEST_CASE("exponent literals: integer, negative, rational") {
    CHECK(value(parse_expression("x1^3"), 2.0, 0.0) == 8.0);
    CHECK(value(parse_expression("x1^-2"), 2.0, 0.0) == 0.25);
    CHECK(value(parse_expression("x1^(-2)"), 2.0, 0.0) == 0.25);
    CHECK(value(parse_expression("x1^(1/2)"), 9.0, 0.0) == Catch::Approx(3.0));
    CHECK(value(parse_expression("x1^(2/3)"), 8.0, 0.0) == Catch::Approx(4.0));
    // integer exponents stay total at negative bases
    CHECK(value(parse_expression("x1^2"), -3.0, 0.0) == 9.0);
}

TEST_CASE("syntax error carries the offending position") {
    try {
        parse_expression("sin(x1 +)");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 1);
        CHECK(e.col == 9);
    }
    CHECK_THROWS_AS(parse_expression("x1^x2"), SyntaxError);
    CHECK_THROWS_AS(parse_expression("(x1"), SyntaxError);
    CHECK_THROWS_AS(parse_expression("x1 x2"), SyntaxError);
}

TEST_CASE("unknown identifiers and arity violations are diagnosed") {
    try {
        parse_expression("2 + foo(x1)");
        FAIL("expected UnknownIdentifierError");
    } catch (const UnknownIdentifierError& e) {
        CHECK(e.col == 5);
    }
    CHECK_THROWS_AS(parse_expression("sin(x1, x2)"), ArityError);
    CHECK_THROWS_AS(parse_expression("x3"), UnknownIdentifierError);
}

TEST_CASE("print-parse round trip yields identical trees") {
    oracles::Rng rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const ExprPtr t = random_tree(rng, 4);
        const std::string printed = print_expr(*t);
        const ExprPtr back = parse_expression(printed);
        INFO(printed);
        CHECK(expr_equal(*t, *back));
    }
}

TEST_CASE("printed constants survive the round trip bit for bit") {
    const ExprPtr t = Expr::constant(3.14159265358979323846);
    const ExprPtr back = parse_expression(print_expr(*t));
    CHECK(back->cval == t->cval);
}

TEST_CASE("jet evaluation of parsed expressions matches finite differences") {
    oracles::Rng rng(17);
    const char* sources[] = {
        "sin(x1)*cos(x2) + x1^2/(x2+3)",
        "sqrt(x1+2) * log(x2+4)",
        "(x1 - x2)^3 + 2*x1*x2",
    };
    for (const char* src : sources) {
        const ExprPtr e = parse_expression(src);
        for (int trial = 0; trial < 30; ++trial) {
            const double x = rng.uniform(0.2, 1.5), y = rng.uniform(0.2, 1.5);
            const Jet j = eval_expr(*e, Jet::variable(x, 0), Jet::variable(y, 1));
            auto f = [&](double a, double b) { return eval_expr_value(*e, a, b); };
            for (int axis = 0; axis < 2; ++axis) {
                const double want = oracles::fd_d1(f, x, y, axis, 1e-4);
                CHECK(std::abs(j.d1[axis] - want) <=
                      1e-5 * std::max(1.0, std::abs(want)));
            }
            for (int s = 0; s < 3; ++s) {
                const double want = oracles::fd_d2(f, x, y, s, 1e-4);
                CHECK(std::abs(j.d2[s] - want) <=
                      1e-5 * std::max(1.0, std::abs(want)));
            }
        }
    }
}
