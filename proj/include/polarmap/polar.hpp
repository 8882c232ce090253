#pragma once

#include <cmath>

#include "polarmap/surface.hpp"

namespace polarmap {

/// A point (x, t) of the unit normal bundle with its cached base frame;
/// the bundle direction at angle t is cos(t) v3 + sin(t) v4.
struct BundlePoint {
    double x1 = 0.0, x2 = 0.0;
    double t = 0.0;  // normalized to [0, 2*pi)
    AdaptedFrame frame;
};

inline double normalize_angle(double t) {
    const double two_pi = 6.283185307179586476925286766559;
    t = std::fmod(t, two_pi);
    if (t < 0.0) t += two_pi;
    return t;
}

inline BundlePoint bundle_point(const ImmersionSpec& spec, double x1, double x2,
                                double t, const Tolerances& tol = Tolerances{}) {
    BundlePoint p;
    p.x1 = x1;
    p.x2 = x2;
    p.t = normalize_angle(t);
    p.frame = adapted_frame(spec, x1, x2, nullptr, tol);
    return p;
}

/// Value, unit normal and differential of the normal-bundle map
/// Psi(x, t) = cos(t) v3(x) + sin(t) v4(x), with xi(x, t) = g(x).
/// dpsi = images of (v1, v2, d/dt); regularity is the function whose
/// positivity characterizes immersed points:
///   r = (a cos t + c sin t)^2 + (b cos t)^2.
struct PolarTangentData {
    Vec5 position;
    Vec5 xi;
    std::array<Vec5, 3> dpsi{};
    double regularity = 0.0;
};

inline double regularity_of(const ShapeData& s, double t) {
    const double p = s.a * std::cos(t) + s.c * std::sin(t);
    const double q = s.b * std::cos(t);
    return p * p + q * q;
}

inline PolarTangentData polar_point(const SurfaceData& sd, double t) {
    PolarTangentData d;
    d.position = std::cos(t) * sd.frame.v3 + std::sin(t) * sd.frame.v4;
    d.xi = sd.g;
    d.regularity = regularity_of(sd.shape, t);
    return d;
}

inline PolarTangentData polar_differential(const SurfaceData& sd, double t) {
    PolarTangentData d = polar_point(sd, t);
    const double ct = std::cos(t), st = std::sin(t);
    const Vec5 circle = -st * sd.frame.v3 + ct * sd.frame.v4;  // d/dt direction
    const double p = sd.shape.a * ct + sd.shape.c * st;
    const double q = sd.shape.b * ct;
    d.dpsi[0] = -p * sd.frame.v1 - q * sd.frame.v2 + sd.shape.omega34[0] * circle;
    d.dpsi[1] = -q * sd.frame.v1 + p * sd.frame.v2 + sd.shape.omega34[1] * circle;
    d.dpsi[2] = circle;
    return d;
}

// spec-facing overloads; the SurfaceData forms are for cached sweeps
inline PolarTangentData polar_point(const ImmersionSpec& spec, double x1,
                                    double x2, double t,
                                    const Tolerances& tol = Tolerances{}) {
    return polar_point(surface_data(spec, x1, x2, nullptr, tol), t);
}

inline PolarTangentData polar_differential(const ImmersionSpec& spec, double x1,
                                           double x2, double t,
                                           const Tolerances& tol = Tolerances{}) {
    return polar_differential(surface_data(spec, x1, x2, nullptr, tol), t);
}

inline double regularity(const ImmersionSpec& spec, double x1, double x2,
                         double t, const Tolerances& tol = Tolerances{}) {
    const AdaptedFrame f = adapted_frame(spec, x1, x2, nullptr, tol);
    return regularity_of(shape_operators(spec, x1, x2, f, tol), t);
}

/// Shape operator of the polar hypersurface with respect to xi = g, in an
/// orthonormalized tangent basis, with its spectrum. k2 vanishes and
/// k1 = -k3 = 1 / sqrt(r) wherever the map is regular.
struct HypersurfaceShape {
    Mat<3> shape3{};
    double k1 = 0.0, k2 = 0.0, k3 = 0.0;
    double K_GK = 0.0;  // Gauss-Kronecker curvature k1 k2 k3
    double S = 0.0;     // squared length of the second fundamental form
    double sym_residual = 0.0;
};

namespace detail {

struct PolarShapeWork {
    PolarTangentData pd;
    std::array<Vec5, 3> basis;    // orthonormal, basis[0] = dpsi(d/dt)
    std::array<std::array<double, 3>, 3> coef;  // basis[k] over (dpsi_t, dpsi_1, dpsi_2)
    HypersurfaceShape shape;
    SymEigen<3> eig;              // of shape3 in `basis`
};

/// Weingarten form: A X = -(ambient derivative of xi along X)^tangent,
/// where xi moves by dg on base directions and not at all along d/dt.
inline PolarShapeWork polar_shape_work(const SurfaceData& sd, double t,
                                       const Tolerances& tol) {
    PolarShapeWork w;
    w.pd = polar_differential(sd, t);
    if (!(w.pd.regularity > tol.regular_min))
        throw SingularPointError("polar map singular: r <= tolerance");

    const std::array<Vec5, 3> raw{w.pd.dpsi[2], w.pd.dpsi[0], w.pd.dpsi[1]};
    // modified Gram-Schmidt with coefficient tracking; raw[0] is unit
    std::array<std::array<double, 3>, 3>& c = w.coef;
    c = {};
    for (int k = 0; k < 3; ++k) {
        Vec5 v = raw[k];
        std::array<double, 3> ck{};
        ck[k] = 1.0;
        for (int j = 0; j < k; ++j) {
            const double d = dot(v, w.basis[j]);
            v = v - d * w.basis[j];
            for (int i = 0; i < 3; ++i) ck[i] -= d * c[j][i];
        }
        const double n = norm(v);
        if (!(n > 1e-12))
            throw SingularPointError("polar differential rank deficient");
        w.basis[k] = v / n;
        for (int i = 0; i < 3; ++i) c[k][i] = ck[i] / n;
    }

    // xi-derivative along basis[k]; raw order is (d/dt, v1, v2)
    std::array<Vec5, 3> dxi;
    for (int k = 0; k < 3; ++k)
        dxi[k] = c[k][1] * sd.frame.v1 + c[k][2] * sd.frame.v2;

    Mat<3> s{};
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) s[k][l] = -dot(dxi[k], w.basis[l]);
    double asym = 0.0;
    for (int k = 0; k < 3; ++k)
        for (int l = k + 1; l < 3; ++l)
            asym = std::max(asym, std::abs(s[k][l] - s[l][k]));
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
            const double v = 0.5 * (s[k][l] + s[l][k]);
            w.shape.shape3[k][l] = v;
        }
    w.shape.sym_residual = asym;

    w.eig = sym_eigen<3>(w.shape.shape3, tol.sign_eps);
    w.shape.k1 = w.eig.eigenvalues[0];
    w.shape.k2 = w.eig.eigenvalues[1];
    w.shape.k3 = w.eig.eigenvalues[2];
    w.shape.K_GK = w.shape.k1 * w.shape.k2 * w.shape.k3;
    w.shape.S =
        w.shape.k1 * w.shape.k1 + w.shape.k2 * w.shape.k2 + w.shape.k3 * w.shape.k3;
    return w;
}

}  // namespace detail

inline HypersurfaceShape hypersurface_shape(const SurfaceData& sd, double t,
                                            const Tolerances& tol = Tolerances{}) {
    return detail::polar_shape_work(sd, t, tol).shape;
}

inline HypersurfaceShape hypersurface_shape(const ImmersionSpec& spec, double x1,
                                            double x2, double t,
                                            const Tolerances& tol = Tolerances{}) {
    return hypersurface_shape(surface_data(spec, x1, x2, nullptr, tol), t, tol);
}

/// Principal directions of the polar hypersurface: e1, e3 for +/- k1,
/// e2 = dpsi(d/dt) exactly (the kernel direction). Signs follow `align`
/// when given, else the deterministic eigenvector convention.
struct PrincipalFrame {
    Vec5 e1, e2, e3;
    double k1 = 0.0;
};

inline PrincipalFrame principal_frame(const SurfaceData& sd, double t,
                                      const PrincipalFrame* align = nullptr,
                                      const Tolerances& tol = Tolerances{}) {
    const auto w = detail::polar_shape_work(sd, t, tol);
    PrincipalFrame f;
    f.k1 = w.shape.k1;
    f.e2 = w.pd.dpsi[2];
    f.e1 = w.eig.eigenvectors[0][0] * w.basis[0] +
           w.eig.eigenvectors[1][0] * w.basis[1] +
           w.eig.eigenvectors[2][0] * w.basis[2];
    f.e3 = w.eig.eigenvectors[0][2] * w.basis[0] +
           w.eig.eigenvectors[1][2] * w.basis[1] +
           w.eig.eigenvectors[2][2] * w.basis[2];
    if (align != nullptr) {
        if (dot(f.e1, align->e1) < 0.0) f.e1 = -f.e1;
        if (dot(f.e3, align->e3) < 0.0) f.e3 = -f.e3;
    }
    return f;
}

inline PrincipalFrame principal_frame(const ImmersionSpec& spec, double x1,
                                      double x2, double t,
                                      const Tolerances& tol = Tolerances{}) {
    return principal_frame(surface_data(spec, x1, x2, nullptr, tol), t, nullptr,
                           tol);
}

}  // namespace polarmap
