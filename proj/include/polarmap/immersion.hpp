#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "polarmap/expr.hpp"
#include "polarmap/linalg.hpp"

namespace polarmap {

struct DomainRect {
    double x1min = 0.0, x1max = 1.0;
    double x2min = 0.0, x2max = 1.0;
    double margin = 0.0;

    double lo1() const { return x1min + margin; }
    double hi1() const { return x1max - margin; }
    double lo2() const { return x2min + margin; }
    double hi2() const { return x2max - margin; }

    bool contains(double x1, double x2) const {
        return x1 >= lo1() && x1 <= hi1() && x2 >= lo2() && x2 <= hi2();
    }
};

/// A parsed 5-component map from a parameter rectangle into S^4.
/// Immutable after load; evaluation is pure.
struct ImmersionSpec {
    std::string name;
    DomainRect domain;
    std::array<ExprPtr, 5> components;
    bool claims_minimal = false;
    bool claims_superminimal = false;
};

/// 5 jets of the immersion at a domain point. `order` is validated but the
/// full order-3 jet is always produced.
inline std::array<Jet, 5> eval_jet(const ImmersionSpec& spec, double x1,
                                   double x2, int order = 3) {
    if (order < 0 || order > 3) throw DomainError("jet order must be 0..3");
    if (!spec.domain.contains(x1, x2)) {
        std::ostringstream os;
        os << "point (" << x1 << ", " << x2 << ") outside domain of '"
           << spec.name << "'";
        throw DomainError(os.str());
    }
    const Jet j1 = Jet::variable(x1, 0);
    const Jet j2 = Jet::variable(x2, 1);
    std::array<Jet, 5> out;
    for (int i = 0; i < 5; ++i) out[i] = eval_expr(*spec.components[i], j1, j2);
    return out;
}

inline Vec5 value_of(const std::array<Jet, 5>& jets) {
    Vec5 v;
    for (int i = 0; i < 5; ++i) v[i] = jets[i].value;
    return v;
}

inline Vec5 partial_of(const std::array<Jet, 5>& jets, int axis) {
    Vec5 v;
    for (int i = 0; i < 5; ++i) v[i] = jets[i].d1[axis];
    return v;
}

namespace detail {

inline void validate_spec(const ImmersionSpec& spec, const Tolerances& tol) {
    if (!(spec.domain.x1max - spec.domain.x1min > 2.0 * spec.domain.margin) ||
        !(spec.domain.x2max - spec.domain.x2min > 2.0 * spec.domain.margin))
        throw ValidationError("domain empty after margin");
    const int n = tol.load_grid;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double x1 = spec.domain.lo1() +
                              (spec.domain.hi1() - spec.domain.lo1()) * i / (n - 1);
            const double x2 = spec.domain.lo2() +
                              (spec.domain.hi2() - spec.domain.lo2()) * j / (n - 1);
            const auto jets = eval_jet(spec, x1, x2);
            const Vec5 g = value_of(jets);
            if (std::abs(norm(g) - 1.0) > tol.sphericality) {
                std::ostringstream os;
                os << "sphericality violated at (" << x1 << ", " << x2
                   << "): | |g| - 1 | = " << std::abs(norm(g) - 1.0);
                throw ValidationError(os.str());
            }
            const Vec5 d1 = partial_of(jets, 0), d2 = partial_of(jets, 1);
            const double gram =
                dot(d1, d1) * dot(d2, d2) - dot(d1, d2) * dot(d1, d2);
            if (!(gram > tol.rank_gram_min)) {
                std::ostringstream os;
                os << "immersion rank deficient at (" << x1 << ", " << x2
                   << "): Gram determinant = " << gram;
                throw ValidationError(os.str());
            }
        }
    }
}

inline double constant_bound(const ExprPtr& e, const dsl::Token& where) {
    if (expr_has_variable(*e))
        throw SyntaxError("domain bound must be constant", where.line, where.col);
    return eval_expr_value(*e, 0.0, 0.0);
}

}  // namespace detail

/// Parse the immersion file format:
///   immersion <name>
///   domain x1 <min> <max> x2 <min> <max> margin <m>
///   c1 = <expr> ... c5 = <expr>
///   flags minimal superminimal      (optional)
/// Bounds may be constant expressions (e.g. pi-0.2). Validation samples a
/// load-time grid for sphericality and rank.
inline ImmersionSpec parse_immersion(std::string_view text,
                                     const Tolerances& tol = Tolerances{}) {
    ImmersionSpec spec;
    std::vector<std::pair<int, std::string>> lines;  // (line number, text)
    {
        int ln = 1;
        std::string cur;
        for (char ch : text) {
            if (ch == '\n') {
                lines.emplace_back(ln, cur);
                cur.clear();
                ++ln;
            } else {
                cur += ch;
            }
        }
        if (!cur.empty()) lines.emplace_back(ln, cur);
    }
    auto non_blank = [](const std::string& s) {
        return s.find_first_not_of(" \t\r") != std::string::npos;
    };

    std::size_t idx = 0;
    auto next_line = [&]() -> const std::pair<int, std::string>* {
        while (idx < lines.size() && !non_blank(lines[idx].second)) ++idx;
        if (idx == lines.size()) return nullptr;
        return &lines[idx++];
    };

    // header
    const auto* header = next_line();
    if (!header) throw ValidationError("empty immersion source");
    {
        dsl::Parser p(header->second, header->first);
        const auto& t = p.current();
        if (t.kind != dsl::Token::Kind::Ident || t.text != "immersion")
            throw SyntaxError("expected 'immersion <name>'", t.line, t.col);
        std::istringstream is(header->second);
        std::string kw;
        is >> kw >> spec.name;
        if (spec.name.empty())
            throw SyntaxError("missing immersion name", header->first, 1);
    }

    // domain
    const auto* dom = next_line();
    if (!dom) throw ValidationError("missing domain line");
    {
        dsl::Lexer lex(dom->second, dom->first);
        auto expect_ident = [&](const char* what) {
            const auto t = lex.next();
            if (t.kind != dsl::Token::Kind::Ident || t.text != what)
                throw SyntaxError(std::string("expected '") + what + "'", t.line,
                                  t.col);
            return t;
        };
        // re-parse the numeric fields as constant expressions split on keywords
        const std::string& s = dom->second;
        const auto x1pos = s.find(" x1 ");
        const auto x2pos = s.find(" x2 ");
        const auto mpos = s.find(" margin ");
        if (x1pos == std::string::npos || x2pos == std::string::npos ||
            mpos == std::string::npos || !(x1pos < x2pos && x2pos < mpos))
            throw SyntaxError("expected 'domain x1 <min> <max> x2 <min> <max> margin <m>'",
                              dom->first, 1);
        expect_ident("domain");
        auto parse_two = [&](std::string_view range) -> std::pair<double, double> {
            // two whitespace-separated constant expressions
            dsl::Parser p(range, dom->first);
            ExprPtr lo = p.parse_expression();
            ExprPtr hi = p.parse_expression();
            p.expect_end();
            return {detail::constant_bound(lo, p.current()),
                    detail::constant_bound(hi, p.current())};
        };
        auto [a, b] = parse_two(std::string_view(s).substr(x1pos + 4, x2pos - x1pos - 4));
        auto [c, d] = parse_two(std::string_view(s).substr(x2pos + 4, mpos - x2pos - 4));
        spec.domain.x1min = a;
        spec.domain.x1max = b;
        spec.domain.x2min = c;
        spec.domain.x2max = d;
        {
            dsl::Parser p(std::string_view(s).substr(mpos + 8), dom->first);
            ExprPtr m = p.parse_expression();
            p.expect_end();
            spec.domain.margin = detail::constant_bound(m, p.current());
        }
        if (spec.domain.margin < 0.0)
            throw ValidationError("margin must be non-negative");
    }

    // components c1..c5, then optional flags
    int have = 0;
    while (const auto* line = next_line()) {
        std::istringstream is(line->second);
        std::string head;
        is >> head;
        if (head == "flags") {
            std::string flag;
            while (is >> flag) {
                if (flag == "minimal") spec.claims_minimal = true;
                else if (flag == "superminimal") spec.claims_superminimal = true;
                else throw ValidationError("unknown flag '" + flag + "'");
            }
            continue;
        }
        const std::string expected = "c" + std::to_string(have + 1);
        if (head != expected) {
            if (have >= 5)
                throw SyntaxError("unexpected line '" + head + "'", line->first, 1);
            throw SyntaxError("expected '" + expected + " = <expression>'",
                              line->first, 1);
        }
        const auto eq = line->second.find('=');
        if (eq == std::string::npos)
            throw SyntaxError("expected '='", line->first, 1);
        dsl::Parser p(std::string_view(line->second).substr(eq + 1), line->first);
        spec.components[have] = p.parse_expression();
        p.expect_end();
        ++have;
    }
    if (have != 5)
        throw ValidationError("immersion needs exactly 5 components, got " +
                              std::to_string(have));

    detail::validate_spec(spec, tol);
    return spec;
}

/// Canonical round-trip form of a spec.
inline std::string print_immersion(const ImmersionSpec& spec) {
    char buf[40];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::string out = "immersion " + spec.name + "\n";
    out += "domain x1 " + num(spec.domain.x1min) + " " + num(spec.domain.x1max) +
           " x2 " + num(spec.domain.x2min) + " " + num(spec.domain.x2max) +
           " margin " + num(spec.domain.margin) + "\n";
    for (int i = 0; i < 5; ++i)
        out += "c" + std::to_string(i + 1) + " = " +
               print_expr(*spec.components[i]) + "\n";
    if (spec.claims_minimal || spec.claims_superminimal) {
        out += "flags";
        if (spec.claims_minimal) out += " minimal";
        if (spec.claims_superminimal) out += " superminimal";
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// built-in gallery
// ---------------------------------------------------------------------------

namespace detail {

// spherical chart of the curvature-1/3 sphere (radius sqrt(3)) composed
// with the classical quadratic map into S^4; poles excluded by the domain
inline constexpr const char* kVeroneseSource =
    "immersion veronese\n"
    "domain x1 0.2 pi-0.2 x2 0 2*pi margin 0\n"
    "c1 = sqrt(3) * sin(x1)^2 * cos(x2) * sin(x2)\n"
    "c2 = sqrt(3) * sin(x1) * cos(x1) * cos(x2)\n"
    "c3 = sqrt(3) * sin(x1) * cos(x1) * sin(x2)\n"
    "c4 = (sqrt(3)/2) * sin(x1)^2 * (cos(x2)^2 - sin(x2)^2)\n"
    "c5 = (sin(x1)^2 - 2*cos(x1)^2) / 2\n"
    "flags minimal superminimal\n";

// flat minimal torus inside the equatorial S^3; normal curvature vanishes
inline constexpr const char* kCliffordSource =
    "immersion clifford\n"
    "domain x1 0 2*pi x2 0 2*pi margin 0\n"
    "c1 = cos(sqrt(2)*x1) / sqrt(2)\n"
    "c2 = sin(sqrt(2)*x1) / sqrt(2)\n"
    "c3 = cos(sqrt(2)*x2) / sqrt(2)\n"
    "c4 = sin(sqrt(2)*x2) / sqrt(2)\n"
    "c5 = 0\n"
    "flags minimal\n";

// totally geodesic S^2 in a coordinate S^2 of S^4
inline constexpr const char* kGeodesic2Source =
    "immersion geodesic2\n"
    "domain x1 0.2 pi-0.2 x2 0 2*pi margin 0\n"
    "c1 = sin(x1) * cos(x2)\n"
    "c2 = sin(x1) * sin(x2)\n"
    "c3 = cos(x1)\n"
    "c4 = 0\n"
    "c5 = 0\n"
    "flags minimal\n";

}  // namespace detail

inline const char* gallery_source(std::string_view name) {
    if (name == "veronese") return detail::kVeroneseSource;
    if (name == "clifford") return detail::kCliffordSource;
    if (name == "geodesic2") return detail::kGeodesic2Source;
    throw UnknownGalleryError("unknown gallery immersion '" + std::string(name) +
                              "'");
}

inline const ImmersionSpec& gallery(std::string_view name) {
    static const ImmersionSpec veronese =
        parse_immersion(detail::kVeroneseSource);
    static const ImmersionSpec clifford =
        parse_immersion(detail::kCliffordSource);
    static const ImmersionSpec geodesic2 =
        parse_immersion(detail::kGeodesic2Source);
    if (name == "veronese") return veronese;
    if (name == "clifford") return clifford;
    if (name == "geodesic2") return geodesic2;
    throw UnknownGalleryError("unknown gallery immersion '" + std::string(name) +
                              "'");
}

}  // namespace polarmap
