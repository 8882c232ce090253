#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <span>

#include "polarmap/config.hpp"
#include "polarmap/errors.hpp"

namespace polarmap {

/// Truncated Taylor data of a scalar function of two parameters, carried to
/// order 3. Mixed partials are stored once: d2 = (xx, xy, yy),
/// d3 = (xxx, xxy, xyy, yyy). Arithmetic composes the chain rule exactly
/// through order 3.
struct Jet {
    double value = 0.0;
    std::array<double, 2> d1{0.0, 0.0};
    std::array<double, 3> d2{0.0, 0.0, 0.0};
    std::array<double, 4> d3{0.0, 0.0, 0.0, 0.0};

    static Jet constant(double c) {
        Jet j;
        j.value = c;
        return j;
    }

    /// The coordinate function x1 (axis 0) or x2 (axis 1) at a point.
    static Jet variable(double v, int axis) {
        Jet j;
        j.value = v;
        j.d1[axis] = 1.0;
        return j;
    }
};

inline Jet operator+(const Jet& a, const Jet& b) {
    Jet r;
    r.value = a.value + b.value;
    for (int i = 0; i < 2; ++i) r.d1[i] = a.d1[i] + b.d1[i];
    for (int i = 0; i < 3; ++i) r.d2[i] = a.d2[i] + b.d2[i];
    for (int i = 0; i < 4; ++i) r.d3[i] = a.d3[i] + b.d3[i];
    return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
    Jet r;
    r.value = a.value - b.value;
    for (int i = 0; i < 2; ++i) r.d1[i] = a.d1[i] - b.d1[i];
    for (int i = 0; i < 3; ++i) r.d2[i] = a.d2[i] - b.d2[i];
    for (int i = 0; i < 4; ++i) r.d3[i] = a.d3[i] - b.d3[i];
    return r;
}

inline Jet operator-(const Jet& a) {
    Jet r;
    r.value = -a.value;
    for (int i = 0; i < 2; ++i) r.d1[i] = -a.d1[i];
    for (int i = 0; i < 3; ++i) r.d2[i] = -a.d2[i];
    for (int i = 0; i < 4; ++i) r.d3[i] = -a.d3[i];
    return r;
}

// Leibniz rule through third order.
inline Jet operator*(const Jet& f, const Jet& g) {
    Jet r;
    r.value = f.value * g.value;

    r.d1[0] = f.d1[0] * g.value + f.value * g.d1[0];
    r.d1[1] = f.d1[1] * g.value + f.value * g.d1[1];

    r.d2[0] = f.d2[0] * g.value + 2.0 * f.d1[0] * g.d1[0] + f.value * g.d2[0];
    r.d2[1] = f.d2[1] * g.value + f.d1[0] * g.d1[1] + f.d1[1] * g.d1[0] +
              f.value * g.d2[1];
    r.d2[2] = f.d2[2] * g.value + 2.0 * f.d1[1] * g.d1[1] + f.value * g.d2[2];

    r.d3[0] = f.d3[0] * g.value + 3.0 * f.d2[0] * g.d1[0] +
              3.0 * f.d1[0] * g.d2[0] + f.value * g.d3[0];
    r.d3[1] = f.d3[1] * g.value + f.d2[0] * g.d1[1] + 2.0 * f.d2[1] * g.d1[0] +
              2.0 * f.d1[0] * g.d2[1] + f.d1[1] * g.d2[0] + f.value * g.d3[1];
    r.d3[2] = f.d3[2] * g.value + f.d2[2] * g.d1[0] + 2.0 * f.d2[1] * g.d1[1] +
              2.0 * f.d1[1] * g.d2[1] + f.d1[0] * g.d2[2] + f.value * g.d3[2];
    r.d3[3] = f.d3[3] * g.value + 3.0 * f.d2[2] * g.d1[1] +
              3.0 * f.d1[1] * g.d2[2] + f.value * g.d3[3];
    return r;
}

inline Jet operator*(double s, const Jet& a) { return Jet::constant(s) * a; }
inline Jet operator*(const Jet& a, double s) { return Jet::constant(s) * a; }
inline Jet operator+(const Jet& a, double s) { return a + Jet::constant(s); }
inline Jet operator+(double s, const Jet& a) { return a + Jet::constant(s); }
inline Jet operator-(const Jet& a, double s) { return a - Jet::constant(s); }
inline Jet operator-(double s, const Jet& a) { return Jet::constant(s) - a; }

namespace detail {

/// Chain rule for f(u) given f, f', f'', f''' at u.value.
inline Jet compose(const Jet& u, double f0, double f1, double f2, double f3) {
    const double ux = u.d1[0], uy = u.d1[1];
    const double uxx = u.d2[0], uxy = u.d2[1], uyy = u.d2[2];
    Jet r;
    r.value = f0;
    r.d1[0] = f1 * ux;
    r.d1[1] = f1 * uy;
    r.d2[0] = f2 * ux * ux + f1 * uxx;
    r.d2[1] = f2 * ux * uy + f1 * uxy;
    r.d2[2] = f2 * uy * uy + f1 * uyy;
    r.d3[0] = f3 * ux * ux * ux + 3.0 * f2 * ux * uxx + f1 * u.d3[0];
    r.d3[1] = f3 * ux * ux * uy + f2 * (uxx * uy + 2.0 * ux * uxy) + f1 * u.d3[1];
    r.d3[2] = f3 * ux * uy * uy + f2 * (uyy * ux + 2.0 * uy * uxy) + f1 * u.d3[2];
    r.d3[3] = f3 * uy * uy * uy + 3.0 * f2 * uy * uyy + f1 * u.d3[3];
    return r;
}

}  // namespace detail

inline Jet sin(const Jet& u) {
    const double s = std::sin(u.value), c = std::cos(u.value);
    return detail::compose(u, s, c, -s, -c);
}

inline Jet cos(const Jet& u) {
    const double s = std::sin(u.value), c = std::cos(u.value);
    return detail::compose(u, c, -s, -c, s);
}

inline Jet exp(const Jet& u) {
    const double e = std::exp(u.value);
    return detail::compose(u, e, e, e, e);
}

inline Jet log(const Jet& u, double guard = Tolerances{}.singular_arg_guard) {
    if (!(u.value > guard)) throw DomainError("log of non-positive value");
    const double i = 1.0 / u.value;
    return detail::compose(u, std::log(u.value), i, -i * i, 2.0 * i * i * i);
}

inline Jet sqrt(const Jet& u, double guard = Tolerances{}.singular_arg_guard) {
    if (!(u.value > guard)) throw DomainError("sqrt of non-positive value");
    const double s = std::sqrt(u.value);
    const double i = 1.0 / s;
    return detail::compose(u, s, 0.5 * i, -0.25 * i * i * i,
                           0.375 * i * i * i * i * i);
}

inline Jet reciprocal(const Jet& u, double guard = Tolerances{}.div_guard) {
    if (std::abs(u.value) <= guard) throw DomainError("division by near-zero");
    const double i = 1.0 / u.value;
    return detail::compose(u, i, -i * i, 2.0 * i * i * i, -6.0 * i * i * i * i);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
inline Jet operator/(double s, const Jet& b) { return s * reciprocal(b); }

/// Integer power by repeated squaring; total on the whole real line.
inline Jet pow(const Jet& u, long n) {
    if (n < 0) return reciprocal(pow(u, -n));
    Jet r = Jet::constant(1.0);
    Jet base = u;
    unsigned long e = static_cast<unsigned long>(n);
    while (e > 0) {
        if (e & 1ul) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

/// Real power; uses the integer path when the exponent is integral,
/// otherwise requires a strictly positive base.
inline Jet pow(const Jet& u, double p) {
    const double rounded = std::nearbyint(p);
    if (p == rounded && std::abs(p) < 1e9)
        return pow(u, static_cast<long>(rounded));
    if (!(u.value > Tolerances{}.singular_arg_guard))
        throw DomainError("fractional power of non-positive value");
    const double f0 = std::pow(u.value, p);
    const double f1 = p * std::pow(u.value, p - 1.0);
    const double f2 = p * (p - 1.0) * std::pow(u.value, p - 2.0);
    const double f3 = p * (p - 1.0) * (p - 2.0) * std::pow(u.value, p - 3.0);
    return detail::compose(u, f0, f1, f2, f3);
}

inline Jet pow(const Jet& u, const Jet& p) {
    const bool p_const = p.d1[0] == 0.0 && p.d1[1] == 0.0 && p.d2[0] == 0.0 &&
                         p.d2[1] == 0.0 && p.d2[2] == 0.0 && p.d3[0] == 0.0 &&
                         p.d3[1] == 0.0 && p.d3[2] == 0.0 && p.d3[3] == 0.0;
    if (p_const) return pow(u, p.value);
    return exp(p * log(u));
}

enum class Primitive { Add, Sub, Mul, Div, Pow, Sin, Cos, Sqrt, Log };

/// Uniform entry point used by the contract tests; the evaluator calls the
/// functions above directly.
inline Jet apply_primitive(Primitive op, std::span<const Jet> args) {
    auto need = [&](std::size_t n) {
        if (args.size() != n) throw Error("apply_primitive: wrong arity");
    };
    switch (op) {
        case Primitive::Add: need(2); return args[0] + args[1];
        case Primitive::Sub: need(2); return args[0] - args[1];
        case Primitive::Mul: need(2); return args[0] * args[1];
        case Primitive::Div: need(2); return args[0] / args[1];
        case Primitive::Pow: need(2); return pow(args[0], args[1]);
        case Primitive::Sin: need(1); return sin(args[0]);
        case Primitive::Cos: need(1); return cos(args[0]);
        case Primitive::Sqrt: need(1); return sqrt(args[0]);
        case Primitive::Log: need(1); return log(args[0]);
    }
    throw Error("apply_primitive: unknown op");
}

inline std::ostream& operator<<(std::ostream& os, const Jet& j) {
    os << "jet(" << j.value << "; " << j.d1[0] << "," << j.d1[1] << ")";
    return os;
}

}  // namespace polarmap
