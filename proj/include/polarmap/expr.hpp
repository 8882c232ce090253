#pragma once

#include <cctype>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "polarmap/errors.hpp"
#include "polarmap/jet.hpp"

namespace polarmap {

enum class UnaryOp { Neg, Sin, Cos, Sqrt, Log };
enum class BinaryOp { Add, Sub, Mul, Div };

/// Immutable expression tree in the variables x1, x2. Powers keep their
/// literal rational exponent so integer exponents stay total on the whole
/// domain.
struct Expr {
    enum class Kind { Const, Var, Unary, Binary, Pow };

    Kind kind;
    double cval = 0.0;                    // Const
    int var = 0;                          // Var: 0 -> x1, 1 -> x2
    UnaryOp uop = UnaryOp::Neg;           // Unary
    BinaryOp bop = BinaryOp::Add;         // Binary
    std::shared_ptr<const Expr> a, b;     // children
    long pnum = 1, pden = 1;              // Pow exponent pnum/pden

    static std::shared_ptr<const Expr> constant(double v) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Const;
        e->cval = v;
        return e;
    }
    static std::shared_ptr<const Expr> variable(int i) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Var;
        e->var = i;
        return e;
    }
    static std::shared_ptr<const Expr> unary(UnaryOp op,
                                             std::shared_ptr<const Expr> a) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Unary;
        e->uop = op;
        e->a = std::move(a);
        return e;
    }
    static std::shared_ptr<const Expr> binary(BinaryOp op,
                                              std::shared_ptr<const Expr> a,
                                              std::shared_ptr<const Expr> b) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Binary;
        e->bop = op;
        e->a = std::move(a);
        e->b = std::move(b);
        return e;
    }
    static std::shared_ptr<const Expr> power(std::shared_ptr<const Expr> a,
                                             long num, long den) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Pow;
        e->a = std::move(a);
        e->pnum = num;
        e->pden = den;
        return e;
    }
};

using ExprPtr = std::shared_ptr<const Expr>;

inline bool expr_equal(const Expr& x, const Expr& y) {
    if (x.kind != y.kind) return false;
    switch (x.kind) {
        case Expr::Kind::Const: return x.cval == y.cval;
        case Expr::Kind::Var: return x.var == y.var;
        case Expr::Kind::Unary:
            return x.uop == y.uop && expr_equal(*x.a, *y.a);
        case Expr::Kind::Binary:
            return x.bop == y.bop && expr_equal(*x.a, *y.a) &&
                   expr_equal(*x.b, *y.b);
        case Expr::Kind::Pow:
            return x.pnum == y.pnum && x.pden == y.pden && expr_equal(*x.a, *y.a);
    }
    return false;
}

inline bool expr_has_variable(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Const: return false;
        case Expr::Kind::Var: return true;
        case Expr::Kind::Unary:
        case Expr::Kind::Pow: return expr_has_variable(*e.a);
        case Expr::Kind::Binary:
            return expr_has_variable(*e.a) || expr_has_variable(*e.b);
    }
    return false;
}

inline Jet eval_expr(const Expr& e, const Jet& x1, const Jet& x2) {
    switch (e.kind) {
        case Expr::Kind::Const: return Jet::constant(e.cval);
        case Expr::Kind::Var: return e.var == 0 ? x1 : x2;
        case Expr::Kind::Unary: {
            const Jet a = eval_expr(*e.a, x1, x2);
            switch (e.uop) {
                case UnaryOp::Neg: return -a;
                case UnaryOp::Sin: return sin(a);
                case UnaryOp::Cos: return cos(a);
                case UnaryOp::Sqrt: return sqrt(a);
                case UnaryOp::Log: return log(a);
            }
            break;
        }
        case Expr::Kind::Binary: {
            const Jet a = eval_expr(*e.a, x1, x2);
            const Jet b = eval_expr(*e.b, x1, x2);
            switch (e.bop) {
                case BinaryOp::Add: return a + b;
                case BinaryOp::Sub: return a - b;
                case BinaryOp::Mul: return a * b;
                case BinaryOp::Div: return a / b;
            }
            break;
        }
        case Expr::Kind::Pow: {
            const Jet a = eval_expr(*e.a, x1, x2);
            if (e.pden == 1) return pow(a, e.pnum);
            return pow(a, static_cast<double>(e.pnum) / static_cast<double>(e.pden));
        }
    }
    throw Error("eval_expr: malformed tree");
}

inline double eval_expr_value(const Expr& e, double x1, double x2) {
    return eval_expr(e, Jet::constant(x1), Jet::constant(x2)).value;
}

/// Fully parenthesized canonical form; parsing it back yields an
/// identical tree.
inline std::string print_expr(const Expr& e) {
    char buf[40];
    switch (e.kind) {
        case Expr::Kind::Const:
            std::snprintf(buf, sizeof buf, "%.17g", e.cval);
            return buf;
        case Expr::Kind::Var: return e.var == 0 ? "x1" : "x2";
        case Expr::Kind::Unary: {
            const std::string a = print_expr(*e.a);
            switch (e.uop) {
                case UnaryOp::Neg: return "(-" + a + ")";
                case UnaryOp::Sin: return "sin(" + a + ")";
                case UnaryOp::Cos: return "cos(" + a + ")";
                case UnaryOp::Sqrt: return "sqrt(" + a + ")";
                case UnaryOp::Log: return "log(" + a + ")";
            }
            break;
        }
        case Expr::Kind::Binary: {
            const char* op = "+";
            switch (e.bop) {
                case BinaryOp::Add: op = "+"; break;
                case BinaryOp::Sub: op = "-"; break;
                case BinaryOp::Mul: op = "*"; break;
                case BinaryOp::Div: op = "/"; break;
            }
            return "(" + print_expr(*e.a) + op + print_expr(*e.b) + ")";
        }
        case Expr::Kind::Pow: {
            std::string ex = std::to_string(e.pnum);
            if (e.pden != 1) ex = "(" + ex + "/" + std::to_string(e.pden) + ")";
            else if (e.pnum < 0) ex = "(" + ex + ")";
            return "(" + print_expr(*e.a) + "^" + ex + ")";
        }
    }
    throw Error("print_expr: malformed tree");
}

// ---------------------------------------------------------------------------
// tokenizer / parser
// ---------------------------------------------------------------------------

namespace dsl {

struct Token {
    enum class Kind { Number, Ident, Punct, End };
    Kind kind = Kind::End;
    double number = 0.0;
    std::string text;  // identifier or punctuation character
    int line = 1, col = 1;
};

class Lexer {
  public:
    Lexer(std::string_view src, int first_line = 1)
        : src_(src), line_(first_line) {}

    Token next() {
        skip_ws();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) return t;
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            t.kind = Token::Kind::Number;
            t.number = read_number();
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = Token::Kind::Ident;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                    src_[pos_] == '_')) {
                t.text += src_[pos_];
                advance();
            }
            return t;
        }
        if (std::string_view("+-*/^()=,").find(c) != std::string_view::npos) {
            t.kind = Token::Kind::Punct;
            t.text = std::string(1, c);
            advance();
            return t;
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", line_, col_);
    }

  private:
    void advance() {
        if (pos_ < src_.size() && src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    void skip_ws() {
        while (pos_ < src_.size() &&
               std::isspace(static_cast<unsigned char>(src_[pos_])))
            advance();
    }
    double read_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '.'))
            advance();
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            int save_col = col_, save_line = line_;
            advance();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                advance();
            if (pos_ < src_.size() &&
                std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() &&
                       std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    advance();
            } else {  // not an exponent after all
                pos_ = save;
                col_ = save_col;
                line_ = save_line;
            }
        }
        return std::strtod(std::string(src_.substr(start, pos_ - start)).c_str(),
                           nullptr);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_;
    int col_ = 1;
};

/// Pratt-style recursive descent. Precedence, tightest first:
/// ^, unary -, * /, + -.
class Parser {
  public:
    Parser(std::string_view src, int first_line = 1) : lex_(src, first_line) {
        cur_ = lex_.next();
    }

    ExprPtr parse_expression() {
        ExprPtr e = parse_sum();
        return e;
    }

    bool at_end() const { return cur_.kind == Token::Kind::End; }
    const Token& current() const { return cur_; }

    void expect_end() {
        if (!at_end())
            throw SyntaxError("unexpected trailing input", cur_.line, cur_.col);
    }

  private:
    void bump() { cur_ = lex_.next(); }

    bool is_punct(const char* p) const {
        return cur_.kind == Token::Kind::Punct && cur_.text == p;
    }

    ExprPtr parse_sum() {
        ExprPtr e = parse_term();
        while (is_punct("+") || is_punct("-")) {
            const BinaryOp op = is_punct("+") ? BinaryOp::Add : BinaryOp::Sub;
            bump();
            e = Expr::binary(op, e, parse_term());
        }
        return e;
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        while (is_punct("*") || is_punct("/")) {
            const BinaryOp op = is_punct("*") ? BinaryOp::Mul : BinaryOp::Div;
            bump();
            e = Expr::binary(op, e, parse_factor());
        }
        return e;
    }

    ExprPtr parse_factor() {
        if (is_punct("-")) {
            bump();
            return Expr::unary(UnaryOp::Neg, parse_factor());
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr e = parse_atom();
        while (is_punct("^")) {
            bump();
            auto [num, den] = parse_exponent();
            e = Expr::power(e, num, den);
        }
        return e;
    }

    std::pair<long, long> parse_exponent() {
        // integer, -integer, or (p/q) with integer p, q
        bool parens = false;
        if (is_punct("(")) {
            parens = true;
            bump();
        }
        long sign = 1;
        if (is_punct("-")) {
            sign = -1;
            bump();
        }
        if (cur_.kind != Token::Kind::Number ||
            cur_.number != std::nearbyint(cur_.number))
            throw SyntaxError("exponent must be an integer or rational literal",
                              cur_.line, cur_.col);
        long num = sign * static_cast<long>(cur_.number);
        long den = 1;
        bump();
        if (parens && is_punct("/")) {
            bump();
            if (cur_.kind != Token::Kind::Number ||
                cur_.number != std::nearbyint(cur_.number) || cur_.number <= 0)
                throw SyntaxError("exponent denominator must be a positive integer",
                                  cur_.line, cur_.col);
            den = static_cast<long>(cur_.number);
            bump();
        }
        if (parens) {
            if (!is_punct(")"))
                throw SyntaxError("expected ')' after exponent", cur_.line, cur_.col);
            bump();
        }
        return {num, den};
    }

    ExprPtr parse_atom() {
        if (cur_.kind == Token::Kind::Number) {
            ExprPtr e = Expr::constant(cur_.number);
            bump();
            return e;
        }
        if (is_punct("(")) {
            bump();
            ExprPtr e = parse_sum();
            if (!is_punct(")"))
                throw SyntaxError("expected ')'", cur_.line, cur_.col);
            bump();
            return e;
        }
        if (cur_.kind == Token::Kind::Ident) {
            const Token name = cur_;
            bump();
            if (name.text == "x1") return Expr::variable(0);
            if (name.text == "x2") return Expr::variable(1);
            if (name.text == "pi") return Expr::constant(3.14159265358979323846);
            UnaryOp op;
            if (name.text == "sin") op = UnaryOp::Sin;
            else if (name.text == "cos") op = UnaryOp::Cos;
            else if (name.text == "sqrt") op = UnaryOp::Sqrt;
            else if (name.text == "log") op = UnaryOp::Log;
            else
                throw UnknownIdentifierError("unknown identifier '" + name.text + "'",
                                             name.line, name.col);
            if (!is_punct("("))
                throw SyntaxError("expected '(' after function name", cur_.line,
                                  cur_.col);
            bump();
            std::vector<ExprPtr> args;
            args.push_back(parse_sum());
            while (is_punct(",")) {
                bump();
                args.push_back(parse_sum());
            }
            if (!is_punct(")"))
                throw SyntaxError("expected ')'", cur_.line, cur_.col);
            bump();
            if (args.size() != 1)
                throw ArityError(name.text + " takes exactly one argument",
                                 name.line, name.col);
            return Expr::unary(op, args[0]);
        }
        throw SyntaxError("expected expression", cur_.line, cur_.col);
    }

    Lexer lex_;
    Token cur_;
};

}  // namespace dsl

/// Parse a single expression in x1, x2 (used directly by tests; the
/// immersion loader drives the same parser line by line).
inline ExprPtr parse_expression(std::string_view text, int first_line = 1) {
    dsl::Parser p(text, first_line);
    ExprPtr e = p.parse_expression();
    p.expect_end();
    return e;
}

}  // namespace polarmap
