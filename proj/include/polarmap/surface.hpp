#pragma once

#include <cmath>
#include <functional>
#include <optional>

#include "polarmap/immersion.hpp"

namespace polarmap {

/// Orthonormal frame (v1, v2; v3, v4) adapted to an immersion at a point:
/// v1, v2 span the tangent plane and diagonalize the shape operator of v4
/// (v1 to the eigenvalue +c), v3, v4 span the normal plane inside T S^4.
struct AdaptedFrame {
    Vec5 v1, v2, v3, v4;
    int orientation = 1;     // sign of det[g, v1, v2, v3, v4]
    bool ambiguous = false;  // second fundamental form vanishes here
};

/// Shape operators in the adapted frame: A3 = (a b; b -a),
/// A4 = (c 0; 0 -c) with c >= 0. trace_residual is the minimality
/// diagnostic |tr A3| + |tr A4| before projecting out the trace.
struct ShapeData {
    double a = 0.0, b = 0.0, c = 0.0;
    double trace_residual = 0.0;
    std::array<double, 2> omega34{0.0, 0.0};  // normal connection on v1, v2
};

struct SurfaceCurvatures {
    double K = 0.0;       // Gaussian curvature
    double Kn = 0.0;      // normal curvature, sign per stored orientation
    double S_g = 0.0;     // squared length of the second fundamental form
    double defect = 0.0;  // (1-K)^2 - Kn^2
    double mu = 0.0;      // sqrt((1-K)/2)
};

inline SurfaceCurvatures curvatures(const ShapeData& s) {
    SurfaceCurvatures c;
    c.K = 1.0 - (s.a * s.a + s.b * s.b) - s.c * s.c;
    c.Kn = -2.0 * s.b * s.c;
    c.S_g = 2.0 * (1.0 - c.K);
    c.defect = (1.0 - c.K) * (1.0 - c.K) - c.Kn * c.Kn;
    c.mu = std::sqrt(std::max(0.0, 0.5 * (1.0 - c.K)));
    return c;
}

namespace detail {

struct TangentBasis {
    Vec5 g, dg1, dg2;
    Vec5 t1, t2;                    // Gram-Schmidt of the chart partials
    std::array<double, 2> c1, c2;   // chart coordinates of t1, t2
    Mat<2> metric;                  // first fundamental form in the chart
    Vec5 ht11, ht12, ht22;          // ambient Hessian on (t1, t2)
};

inline TangentBasis tangent_basis(const std::array<Jet, 5>& jets,
                                  const Tolerances& tol) {
    TangentBasis b;
    b.g = value_of(jets);
    b.dg1 = partial_of(jets, 0);
    b.dg2 = partial_of(jets, 1);
    b.metric[0][0] = dot(b.dg1, b.dg1);
    b.metric[0][1] = b.metric[1][0] = dot(b.dg1, b.dg2);
    b.metric[1][1] = dot(b.dg2, b.dg2);
    const double gram =
        b.metric[0][0] * b.metric[1][1] - b.metric[0][1] * b.metric[0][1];
    if (!(gram > tol.rank_gram_min))
        throw RankError("immersion rank deficient at frame point");

    const double r11 = std::sqrt(b.metric[0][0]);
    b.t1 = b.dg1 / r11;
    const double proj = dot(b.dg2, b.t1);
    const Vec5 u = b.dg2 - proj * b.t1;
    const double r22 = norm(u);
    b.t2 = u / r22;
    b.c1 = {1.0 / r11, 0.0};
    b.c2 = {-proj / (r11 * r22), 1.0 / r22};

    Vec5 h11, h12, h22;
    for (int k = 0; k < 5; ++k) {
        h11[k] = jets[k].d2[0];
        h12[k] = jets[k].d2[1];
        h22[k] = jets[k].d2[2];
    }
    auto hess = [&](const std::array<double, 2>& p,
                    const std::array<double, 2>& q) {
        return p[0] * q[0] * h11 + (p[0] * q[1] + p[1] * q[0]) * h12 +
               p[1] * q[1] * h22;
    };
    b.ht11 = hess(b.c1, b.c1);
    b.ht12 = hess(b.c1, b.c2);
    b.ht22 = hess(b.c2, b.c2);
    return b;
}

inline Vec5 normal_part(const Vec5& w, const TangentBasis& b) {
    return w - dot(w, b.g) * b.g - dot(w, b.t1) * b.t1 - dot(w, b.t2) * b.t2;
}

// discrete O(2) alignment of the normal pair to a previous frame; never a
// continuous rotation, so canonical smooth sections stay canonical
inline void align_normal_pair(Vec5& w3, Vec5& w4, const AdaptedFrame& prev) {
    const double keep = std::abs(dot(w3, prev.v3)) + std::abs(dot(w4, prev.v4));
    const double swap = std::abs(dot(w4, prev.v3)) + std::abs(dot(w3, prev.v4));
    if (swap > keep) std::swap(w3, w4);
    if (dot(w3, prev.v3) < 0.0) w3 = -w3;
    if (dot(w4, prev.v4) < 0.0) w4 = -w4;
}

}  // namespace detail

/// Builds the adapted frame at a point. The normal section comes from the
/// second fundamental form (first diagonal Hessian direction, then the
/// mixed one), which is smooth and deterministic wherever the immersion is
/// not totally geodesic; degenerate directions fall back to a basis
/// completion. `previous` applies sign flips and swaps only.
inline AdaptedFrame adapted_frame(const ImmersionSpec& spec, double x1,
                                  double x2,
                                  const AdaptedFrame* previous = nullptr,
                                  const Tolerances& tol = Tolerances{}) {
    const auto jets = eval_jet(spec, x1, x2);
    const auto basis = detail::tangent_basis(jets, tol);

    const Vec5 n1 = detail::normal_part(basis.ht11, basis);
    const Vec5 n2 = detail::normal_part(basis.ht12, basis);
    const Vec5 n3 = detail::normal_part(basis.ht22, basis);

    AdaptedFrame f;
    Vec5 w3, w4;
    bool have3 = false, have4 = false;
    if (norm(n1) > tol.flat_tol) {
        w3 = normalized(n1);
        have3 = true;
    } else if (norm(n2) > tol.flat_tol) {
        w3 = normalized(n2);
        have3 = true;
    } else if (norm(n3) > tol.flat_tol) {
        w3 = normalized(n3);
        have3 = true;
    }
    if (have3) {
        for (const Vec5* cand : {&n2, &n3}) {
            const Vec5 r = *cand - dot(*cand, w3) * w3;
            if (norm(r) > tol.flat_tol) {
                w4 = normalized(r);
                have4 = true;
                break;
            }
        }
        if (!have4)
            w4 = complete_complement({basis.g, basis.t1, basis.t2, w3}, {}, 1,
                                     tol.complement_residual_min, tol.sign_eps)[0];
    } else {
        f.ambiguous = true;  // totally geodesic: any normal frame is valid
        auto pair = complete_complement({basis.g, basis.t1, basis.t2}, {}, 2,
                                        tol.complement_residual_min, tol.sign_eps);
        w3 = pair[0];
        w4 = pair[1];
    }

    if (previous != nullptr) detail::align_normal_pair(w3, w4, *previous);
    f.v3 = w3;
    f.v4 = w4;

    // rotate the tangent frame so A4 is diagonal with v1 -> +c
    const double b4_11 = dot(basis.ht11, w4);
    const double b4_12 = dot(basis.ht12, w4);
    const double b4_22 = dot(basis.ht22, w4);
    const double p4 = 0.5 * (b4_11 - b4_22);
    const double q4 = b4_12;
    if (std::hypot(p4, q4) > tol.flat_tol) {
        const Mat<2> a4{{{p4, q4}, {q4, -p4}}};
        const auto eig = sym_eigen<2>(a4, tol.sign_eps);
        f.v1 = eig.eigenvectors[0][0] * basis.t1 + eig.eigenvectors[1][0] * basis.t2;
        f.v2 = eig.eigenvectors[0][1] * basis.t1 + eig.eigenvectors[1][1] * basis.t2;
    } else {
        f.v1 = basis.t1;
        f.v2 = basis.t2;
    }
    if (previous != nullptr) {
        if (dot(f.v1, previous->v1) < 0.0) f.v1 = -f.v1;
        if (dot(f.v2, previous->v2) < 0.0) f.v2 = -f.v2;
    }

    Mat<5> m;
    const Vec5* cols[5] = {&basis.g, &f.v1, &f.v2, &f.v3, &f.v4};
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) m[i][j] = (*cols[j])[i];
    f.orientation = det<5>(m) >= 0.0 ? 1 : -1;
    return f;
}

/// Shape operator entries in the given frame, the minimality diagnostic,
/// and the normal connection form omega34(v1), omega34(v2) by central
/// finite differences of the normal section.
inline ShapeData shape_operators(const ImmersionSpec& spec, double x1, double x2,
                                 const AdaptedFrame& frame,
                                 const Tolerances& tol = Tolerances{}) {
    const auto jets = eval_jet(spec, x1, x2);
    const auto basis = detail::tangent_basis(jets, tol);

    auto frame_coords = [&](const Vec5& v) -> std::array<double, 2> {
        return {dot(v, basis.t1), dot(v, basis.t2)};
    };
    const auto a1 = frame_coords(frame.v1);
    const auto a2 = frame_coords(frame.v2);
    auto hess = [&](const std::array<double, 2>& p,
                    const std::array<double, 2>& q) {
        return p[0] * q[0] * basis.ht11 + (p[0] * q[1] + p[1] * q[0]) * basis.ht12 +
               p[1] * q[1] * basis.ht22;
    };
    const Vec5 h11 = hess(a1, a1), h12 = hess(a1, a2), h22 = hess(a2, a2);

    ShapeData s;
    const double b3_11 = dot(h11, frame.v3), b3_12 = dot(h12, frame.v3),
                 b3_22 = dot(h22, frame.v3);
    const double b4_11 = dot(h11, frame.v4), b4_22 = dot(h22, frame.v4);
    s.a = 0.5 * (b3_11 - b3_22);
    s.b = b3_12;
    s.c = 0.5 * (b4_11 - b4_22);
    s.trace_residual = std::abs(b3_11 + b3_22) + std::abs(b4_11 + b4_22);

    // omega34(v_i) = <D_{v_i} v3, v4> by a central difference of the
    // canonical section along the chart curve with velocity v_i
    const double h = tol.fd_step_omega;
    for (int i = 0; i < 2; ++i) {
        const Vec5& dir = (i == 0) ? frame.v1 : frame.v2;
        const std::array<double, 2> rhs{dot(basis.dg1, dir), dot(basis.dg2, dir)};
        const auto w = solve<2>(basis.metric, rhs);
        const AdaptedFrame fp = adapted_frame(spec, x1 + h * w[0], x2 + h * w[1],
                                              &frame, tol);
        const AdaptedFrame fm = adapted_frame(spec, x1 - h * w[0], x2 - h * w[1],
                                              &frame, tol);
        s.omega34[i] = dot((fp.v3 - fm.v3) / (2.0 * h), frame.v4);
    }
    return s;
}

/// Gauge change: rotates the normal pair by beta and re-adapts the tangent
/// frame to the rotated v4. Frame-independent quantities must not move
/// under this.
inline AdaptedFrame rotate_normal_gauge(const ImmersionSpec& spec, double x1,
                                        double x2, const AdaptedFrame& frame,
                                        double beta,
                                        const Tolerances& tol = Tolerances{}) {
    const auto jets = eval_jet(spec, x1, x2);
    const auto basis = detail::tangent_basis(jets, tol);
    AdaptedFrame f = frame;
    f.v3 = std::cos(beta) * frame.v3 + std::sin(beta) * frame.v4;
    f.v4 = -std::sin(beta) * frame.v3 + std::cos(beta) * frame.v4;
    const double b4_11 = dot(basis.ht11, f.v4);
    const double b4_12 = dot(basis.ht12, f.v4);
    const double b4_22 = dot(basis.ht22, f.v4);
    const double p4 = 0.5 * (b4_11 - b4_22);
    const double q4 = b4_12;
    if (std::hypot(p4, q4) > tol.flat_tol) {
        const Mat<2> a4{{{p4, q4}, {q4, -p4}}};
        const auto eig = sym_eigen<2>(a4, tol.sign_eps);
        f.v1 = eig.eigenvectors[0][0] * basis.t1 + eig.eigenvectors[1][0] * basis.t2;
        f.v2 = eig.eigenvectors[0][1] * basis.t1 + eig.eigenvectors[1][1] * basis.t2;
    } else {
        f.v1 = basis.t1;
        f.v2 = basis.t2;
    }
    return f;
}

/// Everything the bundle-side computations need at one base point.
struct SurfaceData {
    double x1 = 0.0, x2 = 0.0;
    Vec5 g, dg1, dg2;
    Mat<2> metric{};
    AdaptedFrame frame;
    ShapeData shape;
    SurfaceCurvatures curv;
};

inline SurfaceData surface_data(const ImmersionSpec& spec, double x1, double x2,
                                const AdaptedFrame* previous = nullptr,
                                const Tolerances& tol = Tolerances{}) {
    SurfaceData d;
    d.x1 = x1;
    d.x2 = x2;
    const auto jets = eval_jet(spec, x1, x2);
    d.g = value_of(jets);
    d.dg1 = partial_of(jets, 0);
    d.dg2 = partial_of(jets, 1);
    d.metric[0][0] = dot(d.dg1, d.dg1);
    d.metric[0][1] = d.metric[1][0] = dot(d.dg1, d.dg2);
    d.metric[1][1] = dot(d.dg2, d.dg2);
    d.frame = adapted_frame(spec, x1, x2, previous, tol);
    d.shape = shape_operators(spec, x1, x2, d.frame, tol);
    d.curv = curvatures(d.shape);
    return d;
}

// ---------------------------------------------------------------------------
// Laplace-Beltrami residual of the Gaussian-curvature equation
// ---------------------------------------------------------------------------

using MetricFn2 = std::function<Mat<2>(double, double)>;
using ScalarFn2 = std::function<double(double, double)>;

/// Divergence-form Laplace-Beltrami operator on a 2-parameter chart,
/// evaluated by nested central differences with step h; O(h^2) in total
/// and exact for diagonal and non-diagonal metrics alike.
inline double laplace_beltrami_chart2(const MetricFn2& metric,
                                      const ScalarFn2& f, double x1, double x2,
                                      double h) {
    auto flux = [&](int i, double y1, double y2) {
        const Mat<2> g = metric(y1, y2);
        const double dg = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        const double sq = std::sqrt(dg);
        const Mat<2> ginv{{{g[1][1] / dg, -g[0][1] / dg},
                           {-g[1][0] / dg, g[0][0] / dg}}};
        const double df1 = (f(y1 + h, y2) - f(y1 - h, y2)) / (2.0 * h);
        const double df2 = (f(y1, y2 + h) - f(y1, y2 - h)) / (2.0 * h);
        return sq * (ginv[i][0] * df1 + ginv[i][1] * df2);
    };
    const Mat<2> g0 = metric(x1, x2);
    const double sq0 = std::sqrt(g0[0][0] * g0[1][1] - g0[0][1] * g0[1][0]);
    const double d1 = (flux(0, x1 + h, x2) - flux(0, x1 - h, x2)) / (2.0 * h);
    const double d2 = (flux(1, x1, x2 + h) - flux(1, x1, x2 - h)) / (2.0 * h);
    return (d1 + d2) / sq0;
}

/// Residual of Delta log(1-K) = 2(3K-1) for a superminimal immersion,
/// checked with the induced chart metric. Converges at O(h^2) on genuinely
/// superminimal inputs.
inline double pde_residual_21(const ImmersionSpec& spec, double x1, double x2,
                              double h, const Tolerances& tol = Tolerances{}) {
    auto curv_at = [&](double y1, double y2) {
        const AdaptedFrame f = adapted_frame(spec, y1, y2, nullptr, tol);
        return curvatures(shape_operators(spec, y1, y2, f, tol));
    };
    if (!(1.0 - curv_at(x1, x2).K > tol.near_flat))
        throw NearFlatError("K too close to 1 at the center point");
    if (!spec.claims_superminimal)
        throw DomainError("pde_residual_21 requires a superminimal claim");
    auto one_minus_k = [&](double y1, double y2) {
        const double v = 1.0 - curv_at(y1, y2).K;
        if (!(v > tol.near_flat))
            throw NearFlatError("K too close to 1 on the stencil");
        return v;
    };
    auto metric = [&](double y1, double y2) {
        const auto jets = eval_jet(spec, y1, y2);
        const Vec5 d1 = partial_of(jets, 0), d2 = partial_of(jets, 1);
        Mat<2> g;
        g[0][0] = dot(d1, d1);
        g[0][1] = g[1][0] = dot(d1, d2);
        g[1][1] = dot(d2, d2);
        return g;
    };
    auto f = [&](double y1, double y2) { return std::log(one_minus_k(y1, y2)); };
    const double lhs = laplace_beltrami_chart2(metric, f, x1, x2, h);
    const double rhs = 2.0 * (3.0 * curv_at(x1, x2).K - 1.0);
    return std::abs(lhs - rhs);
}

}  // namespace polarmap
