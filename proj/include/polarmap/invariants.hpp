#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "polarmap/polar.hpp"

namespace polarmap {

/// The hypersurface functions at a bundle point and the residuals of the
/// moving-frame equation systems. lambda = k1 > 0; u is the connection
/// coefficient omega12(e3), reported under the u > 0 normalization (e1 is
/// flipped when needed, recorded in flipped_e1); v = e2(log lambda).
/// u is computed two ways: from the normal curvature and lambda (primary)
/// and by finite differences of the principal frame (cross-check).
struct FrameInvariants {
    double lambda = 0.0;
    double u = 0.0;         // |Kn| lambda^2 / 2, the primary route
    double u_direct = 0.0;  // <D_{e3} e1, e2> by finite differences
    double v = 0.0;
    double u_discrepancy = 0.0;
    bool flipped_e1 = false;
    std::array<double, 9> residual_22{};  // row-major over the (2.2) table
    std::array<double, 4> residual_23{};
    double residual_24 = 0.0;
};

struct QuotientShape {
    Mat<2> A1_tilde{};
    Mat<2> A2_tilde{};
    double K_recovered = 0.0;
    double Kn2_recovered = 0.0;
};

struct TheoremQuantities {
    double h = 0.0;  // (u-1)^2 + v^2
    double identity_residual = 0.0;
    double K_hat = 0.0;
    double K_hat_bound = 0.0;
    bool superminimal_conclusion = false;
};

struct FlowSample {
    double s = 0.0;
    double x1 = 0.0, x2 = 0.0, t = 0.0;
    Vec5 position;
    double lambda = 0.0;
    double u = 0.0;
    double v = 0.0;
    double u_over_lambda2 = 0.0;  // from the finite-difference u
};

struct FlowResult {
    std::vector<FlowSample> samples;
    double planarity = 0.0;           // distance from the start plane
    double conservation_drift = 0.0;  // max |u/lambda^2 - initial|
    double closure = 0.0;             // |last position - first position|
    double max_speed_dev = 0.0;       // worst | |dpsi(e2-coords)| - 1 |
};

struct Lemma1Result {
    double conservation_residual = 0.0;
    double harmonic_residual_u = 0.0;
    double harmonic_residual_v = 0.0;
};

struct BlowupResult {
    double blowup_estimate = 0.0;
    std::vector<std::pair<double, double>> profile;  // (s, v)
};

namespace detail {

inline std::array<Vec5, 3> bundle_jacobian(const SurfaceData& sd,
                                           const PolarTangentData& pd) {
    // chart directions map through the tangent frame coordinates of dg
    const double a11 = dot(sd.dg1, sd.frame.v1), a12 = dot(sd.dg1, sd.frame.v2);
    const double a21 = dot(sd.dg2, sd.frame.v1), a22 = dot(sd.dg2, sd.frame.v2);
    return {a11 * pd.dpsi[0] + a12 * pd.dpsi[1],
            a21 * pd.dpsi[0] + a22 * pd.dpsi[1], pd.dpsi[2]};
}

inline std::array<double, 3> solve_direction(const std::array<Vec5, 3>& jac,
                                             const Vec5& target) {
    Mat<3> gram;
    std::array<double, 3> rhs;
    for (int i = 0; i < 3; ++i) {
        rhs[i] = dot(jac[i], target);
        for (int j = 0; j < 3; ++j) gram[i][j] = dot(jac[i], jac[j]);
    }
    return solve<3>(gram, rhs);
}

inline Vec5 apply_jacobian(const std::array<Vec5, 3>& jac,
                           const std::array<double, 3>& w) {
    return w[0] * jac[0] + w[1] * jac[1] + w[2] * jac[2];
}

/// Full evaluation at one bundle point: cached base data, hypersurface
/// spectrum and a principal frame aligned to `align` when given.
struct BundleEval {
    SurfaceData sd;
    PolarShapeWork work;
    PrincipalFrame pf;
    double lambda = 0.0;

    double v_of_t(double h, const Tolerances& tol) const {
        const double lp = polar_shape_work(sd, normalize_angle(work_t + h), tol).shape.k1;
        const double lm = polar_shape_work(sd, normalize_angle(work_t - h), tol).shape.k1;
        return (std::log(lp) - std::log(lm)) / (2.0 * h);
    }
    double u_primary() const {
        return 0.5 * std::abs(sd.curv.Kn) * lambda * lambda;
    }
    double work_t = 0.0;
};

inline BundleEval bundle_eval(const ImmersionSpec& spec, double x1, double x2,
                              double t, const AdaptedFrame* frame_seed,
                              const PrincipalFrame* align,
                              const Tolerances& tol) {
    BundleEval e;
    try {
        e.sd = surface_data(spec, x1, x2, frame_seed, tol);
    } catch (const DomainError& err) {
        throw StencilError(std::string("stencil left the domain: ") + err.what());
    }
    e.work_t = normalize_angle(t);
    e.work = polar_shape_work(e.sd, e.work_t, tol);
    e.pf = principal_frame(e.sd, e.work_t, align, tol);
    e.lambda = e.pf.k1;
    return e;
}

/// Signed <D_{e3} e1, e2> at `center` by a central difference along the
/// chart displacement mapped to e3.
inline double u_direct_signed(const ImmersionSpec& spec, const BundleEval& center,
                              double h, const Tolerances& tol) {
    const auto jac = bundle_jacobian(center.sd, center.work.pd);
    const auto sigma = solve_direction(jac, center.pf.e3);
    const BundleEval ep =
        bundle_eval(spec, center.sd.x1 + h * sigma[0], center.sd.x2 + h * sigma[1],
                    center.work_t + h * sigma[2], &center.sd.frame, &center.pf, tol);
    const BundleEval em =
        bundle_eval(spec, center.sd.x1 - h * sigma[0], center.sd.x2 - h * sigma[1],
                    center.work_t - h * sigma[2], &center.sd.frame, &center.pf, tol);
    return dot((ep.pf.e1 - em.pf.e1) / (2.0 * h), center.pf.e2);
}

}  // namespace detail

/// (lambda, u, v) at a bundle point. Throws ConventionMismatchError when
/// the two u routes disagree in magnitude beyond tolerance.
inline FrameInvariants lambda_u_v(const ImmersionSpec& spec, double x1, double x2,
                                  double t, const Tolerances& tol = Tolerances{}) {
    detail::BundleEval e = detail::bundle_eval(spec, x1, x2, t, nullptr, nullptr, tol);
    FrameInvariants fi;
    fi.lambda = e.lambda;
    fi.u = e.u_primary();
    double ud = detail::u_direct_signed(spec, e, tol.fd_step_omega, tol);
    fi.flipped_e1 = ud < 0.0;
    fi.u_direct = std::abs(ud);
    fi.v = e.v_of_t(tol.fd_step_t, tol);
    fi.u_discrepancy = std::abs(fi.u_direct - fi.u) /
                       std::max({fi.u, fi.u_direct, 1e-2});
    if (fi.u_discrepancy > tol.u_mismatch_rel)
        throw ConventionMismatchError("direct and recovered u disagree");
    return fi;
}

/// Residuals of the connection-form table, the derivative system and the
/// Lie-bracket identity, all by central differences of the continued
/// principal frame with step h_fd.
inline FrameInvariants frame_equation_residuals(const ImmersionSpec& spec,
                                                double x1, double x2, double t,
                                                double h_fd = -1.0,
                                                const Tolerances& tol = Tolerances{}) {
    const double h = h_fd > 0.0 ? h_fd : tol.fd_step_frame;
    detail::BundleEval center = detail::bundle_eval(spec, x1, x2, t, nullptr, nullptr, tol);

    FrameInvariants fi;
    fi.lambda = center.lambda;
    fi.u = center.u_primary();
    {
        const double ud = detail::u_direct_signed(spec, center, tol.fd_step_omega, tol);
        fi.flipped_e1 = ud < 0.0;
        fi.u_direct = std::abs(ud);
        fi.u_discrepancy =
            std::abs(fi.u_direct - fi.u) / std::max({fi.u, fi.u_direct, 1e-2});
        if (fi.flipped_e1) center.pf.e1 = -center.pf.e1;  // u > 0 normalization
    }
    fi.v = center.v_of_t(tol.fd_step_t, tol);
    const double u0 = fi.u, v0 = fi.v;

    const auto jac = detail::bundle_jacobian(center.sd, center.work.pd);
    const Vec5* dirs[3] = {&center.pf.e1, &center.pf.e2, &center.pf.e3};

    std::array<Vec5, 3> d_e1, d_e2, d_e3;
    std::array<double, 3> d_loglam{}, d_u{}, d_v{};
    for (int k = 0; k < 3; ++k) {
        const auto sigma = detail::solve_direction(jac, *dirs[k]);
        auto eval_side = [&](double sgn) {
            detail::BundleEval s = detail::bundle_eval(
                spec, x1 + sgn * h * sigma[0], x2 + sgn * h * sigma[1],
                t + sgn * h * sigma[2], &center.sd.frame, &center.pf, tol);
            return s;
        };
        const detail::BundleEval p = eval_side(1.0);
        const detail::BundleEval m = eval_side(-1.0);
        d_e1[k] = (p.pf.e1 - m.pf.e1) / (2.0 * h);
        d_e2[k] = (p.pf.e2 - m.pf.e2) / (2.0 * h);
        d_e3[k] = (p.pf.e3 - m.pf.e3) / (2.0 * h);
        d_loglam[k] = (std::log(p.lambda) - std::log(m.lambda)) / (2.0 * h);
        d_u[k] = (p.u_primary() - m.u_primary()) / (2.0 * h);
        d_v[k] = (p.v_of_t(tol.fd_step_t, tol) - m.v_of_t(tol.fd_step_t, tol)) /
                 (2.0 * h);
    }

    auto w = [&](const std::array<Vec5, 3>& de, const Vec5& against, int k) {
        return dot(de[k], against);
    };
    const Vec5 &e1 = center.pf.e1, &e2 = center.pf.e2, &e3 = center.pf.e3;
    // connection forms omega_ij(e_k) = <D_k e_i, e_j>
    const double w12_1 = w(d_e1, e2, 0), w13_1 = w(d_e1, e3, 0), w23_1 = w(d_e2, e3, 0);
    const double w12_2 = w(d_e1, e2, 1), w13_2 = w(d_e1, e3, 1), w23_2 = w(d_e2, e3, 1);
    const double w12_3 = w(d_e1, e2, 2), w13_3 = w(d_e1, e3, 2), w23_3 = w(d_e2, e3, 2);

    fi.residual_22 = {std::abs(w12_1 - v0),
                      std::abs(w13_1 - 0.5 * d_loglam[2]),
                      std::abs(w23_1 - u0),
                      std::abs(w12_2),
                      std::abs(w13_2 - 0.5 * u0),
                      std::abs(w23_2),
                      std::abs(w12_3 - u0),
                      std::abs(w13_3 + 0.5 * d_loglam[0]),
                      std::abs(w23_3 + v0)};

    fi.residual_23 = {std::abs(d_v[1] - (v0 * v0 - u0 * u0 + 1.0)),
                      std::abs(d_u[0] - d_v[2]),
                      std::abs(d_u[1] - 2.0 * u0 * v0),
                      std::abs(d_u[2] + d_v[0])};

    const Vec5 bracket = d_e3[0] - d_e1[2];  // [e1, e3] = D_{e1} e3 - D_{e3} e1
    const Vec5 expected =
        -0.5 * d_loglam[2] * e1 - 2.0 * u0 * e2 + 0.5 * d_loglam[0] * e3;
    fi.residual_24 = norm(bracket - expected);
    return fi;
}

// ---------------------------------------------------------------------------
// bundle-chart Laplace-Beltrami for the harmonicity checks
// ---------------------------------------------------------------------------

using MetricFn3 = std::function<Mat<3>(const std::array<double, 3>&)>;
using ScalarFn3 = std::function<double(const std::array<double, 3>&)>;

inline double laplace_beltrami_chart3(const MetricFn3& metric, const ScalarFn3& f,
                                      const std::array<double, 3>& y0, double h) {
    auto inv3 = [](const Mat<3>& m, double& out_det) {
        const double d = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        out_det = d;
        Mat<3> inv;
        inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / d;
        inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d;
        inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d;
        inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / d;
        inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d;
        inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d;
        inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / d;
        inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d;
        inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d;
        return inv;
    };
    auto shifted = [](std::array<double, 3> y, int axis, double delta) {
        y[axis] += delta;
        return y;
    };
    auto flux = [&](int i, const std::array<double, 3>& y) {
        double dg = 0.0;
        const Mat<3> ginv = inv3(metric(y), dg);
        const double sq = std::sqrt(dg);
        double acc = 0.0;
        for (int j = 0; j < 3; ++j) {
            const double df =
                (f(shifted(y, j, h)) - f(shifted(y, j, -h))) / (2.0 * h);
            acc += ginv[i][j] * df;
        }
        return sq * acc;
    };
    double dg0 = 0.0;
    inv3(metric(y0), dg0);
    double acc = 0.0;
    for (int i = 0; i < 3; ++i)
        acc += (flux(i, shifted(y0, i, h)) - flux(i, shifted(y0, i, -h))) /
               (2.0 * h);
    return acc / std::sqrt(dg0);
}

/// Lemma-level checks at a bundle point: e2-conservation of u/lambda^2 and
/// harmonicity of u and v on the bundle chart.
inline Lemma1Result lemma1_checks(const ImmersionSpec& spec, double x1, double x2,
                                  double t, double h_fd = -1.0,
                                  const Tolerances& tol = Tolerances{}) {
    const double h = h_fd > 0.0 ? h_fd : tol.fd_step_lb3;
    detail::BundleEval center = detail::bundle_eval(spec, x1, x2, t, nullptr, nullptr, tol);
    {
        const double ud = detail::u_direct_signed(spec, center, tol.fd_step_omega, tol);
        if (ud < 0.0) center.pf.e1 = -center.pf.e1;
    }

    Lemma1Result out;
    {
        const double hc = tol.fd_step_conservation;
        auto q_at = [&](double dt) {
            detail::BundleEval e = detail::bundle_eval(spec, x1, x2, t + dt,
                                                       &center.sd.frame,
                                                       &center.pf, tol);
            const double ud = detail::u_direct_signed(spec, e, tol.fd_step_omega, tol);
            return ud / (e.lambda * e.lambda);
        };
        out.conservation_residual = std::abs(q_at(hc) - q_at(-hc)) / (2.0 * hc);
    }

    auto metric = [&](const std::array<double, 3>& y) {
        detail::BundleEval e =
            detail::bundle_eval(spec, y[0], y[1], y[2], &center.sd.frame, nullptr, tol);
        const auto jac = detail::bundle_jacobian(e.sd, e.work.pd);
        Mat<3> g;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) g[i][j] = dot(jac[i], jac[j]);
        return g;
    };
    auto f_u = [&](const std::array<double, 3>& y) {
        detail::BundleEval e =
            detail::bundle_eval(spec, y[0], y[1], y[2], &center.sd.frame, nullptr, tol);
        return e.u_primary();
    };
    auto f_v = [&](const std::array<double, 3>& y) {
        detail::BundleEval e =
            detail::bundle_eval(spec, y[0], y[1], y[2], &center.sd.frame, nullptr, tol);
        return e.v_of_t(tol.fd_step_t, tol);
    };
    const std::array<double, 3> y0{x1, x2, t};
    out.harmonic_residual_u = std::abs(laplace_beltrami_chart3(metric, f_u, y0, h));
    out.harmonic_residual_v = std::abs(laplace_beltrami_chart3(metric, f_v, y0, h));
    return out;
}

/// Shape operators of the quotient surface in the basis (X1, X2), plus the
/// curvatures they imply; the caller compares them against the base
/// surface values.
inline QuotientShape quotient_shape(const ImmersionSpec& spec, double x1,
                                    double x2, double t,
                                    const Tolerances& tol = Tolerances{}) {
    const FrameInvariants fi = lambda_u_v(spec, x1, x2, t, tol);
    QuotientShape q;
    const double il = 1.0 / fi.lambda;
    q.A1_tilde = {{{il, 0.0}, {0.0, -il}}};
    q.A2_tilde = {{{-fi.v * il, -fi.u * il}, {-fi.u * il, fi.v * il}}};
    q.K_recovered =
        1.0 - (1.0 + fi.u * fi.u + fi.v * fi.v) / (fi.lambda * fi.lambda);
    q.Kn2_recovered = 4.0 * fi.u_direct * fi.u_direct /
                      (fi.lambda * fi.lambda * fi.lambda * fi.lambda);
    return q;
}

/// The scalar quantities in the rigidity argument: h = (u-1)^2 + v^2, the
/// algebraic identity 4u^2v^2 + (v^2-u^2+1)^2 = h^2 + 4uh behind its
/// differential inequality, and the conformal curvature with its lower
/// bound from inf S.
inline TheoremQuantities theorem_quantities(double u, double v, double K,
                                            std::span<const double> S_samples,
                                            const Tolerances& tol = Tolerances{}) {
    TheoremQuantities tq;
    tq.h = (u - 1.0) * (u - 1.0) + v * v;
    const double lhs = 4.0 * u * u * v * v +
                       (v * v - u * u + 1.0) * (v * v - u * u + 1.0);
    const double rhs = tq.h * tq.h + 4.0 * u * tq.h;
    tq.identity_residual = std::abs(lhs - rhs);
    tq.superminimal_conclusion = tq.h < tol.superminimal_h;
    if (!(1.0 - K > tol.near_flat))
        throw NearFlatError("conformal curvature undefined near K = 1");
    tq.K_hat = 1.0 / (3.0 * std::cbrt(1.0 - K));
    if (S_samples.empty()) throw Error("theorem_quantities: no S samples");
    double inf_s = S_samples[0];
    for (double s : S_samples) inf_s = std::min(inf_s, s);
    tq.K_hat_bound = std::cbrt(inf_s / 4.0) / 3.0;
    return tq;
}

/// Integrates the e2 field in bundle coordinates with classical RK4. The
/// field at each state is obtained by solving d(Psi) sigma = e2, so unit
/// speed and the frozen base point are numerical outcomes, not inputs.
inline FlowResult flow_e2(const ImmersionSpec& spec, double x1, double x2,
                          double t, double length, int steps,
                          const Tolerances& tol = Tolerances{}) {
    if (steps <= 0) throw ConfigError("flow steps must be positive");
    const double h = length / steps;
    FlowResult out;

    auto field = [&](const std::array<double, 3>& y,
                     detail::BundleEval* keep) -> std::array<double, 3> {
        detail::BundleEval e;
        try {
            e = detail::bundle_eval(spec, y[0], y[1], y[2], nullptr, nullptr, tol);
        } catch (const SingularPointError&) {
            throw SingularEncounterError("flow reached a singular point");
        }
        if (!(e.work.pd.regularity > tol.regular_min))
            throw SingularEncounterError("flow reached a singular point");
        const auto jac = detail::bundle_jacobian(e.sd, e.work.pd);
        const auto sigma = detail::solve_direction(jac, e.work.pd.dpsi[2]);
        const double speed = norm(detail::apply_jacobian(jac, sigma));
        out.max_speed_dev = std::max(out.max_speed_dev, std::abs(speed - 1.0));
        if (std::abs(speed - 1.0) > tol.suite_flow_speed)
            throw StepError("flow speed deviates from arc length");
        if (keep != nullptr) *keep = std::move(e);
        return sigma;
    };

    std::array<double, 3> y{x1, x2, t};
    const int stride = std::max(1, steps / 512);
    Vec5 plane_q1, plane_q2, first_pos;
    double q0 = 0.0;
    bool have_q0 = false;
    PrincipalFrame track;  // continued along the trajectory for sign stability
    bool have_track = false;

    for (int i = 0; i <= steps; ++i) {
        detail::BundleEval e;
        const auto k1 = field(y, &e);
        const Vec5 pos = e.work.pd.position;
        if (i == 0) {
            first_pos = pos;
            plane_q1 = pos;  // unit by construction
            const Vec5 vel = e.work.pd.dpsi[2];
            plane_q2 = normalized(vel - dot(vel, plane_q1) * plane_q1);
        }
        const Vec5 off =
            pos - dot(pos, plane_q1) * plane_q1 - dot(pos, plane_q2) * plane_q2;
        out.planarity = std::max(out.planarity, norm(off));
        out.closure = norm(pos - first_pos);

        if (i % stride == 0 || i == steps) {
            if (have_track) {
                if (dot(e.pf.e1, track.e1) < 0.0) e.pf.e1 = -e.pf.e1;
                if (dot(e.pf.e3, track.e3) < 0.0) e.pf.e3 = -e.pf.e3;
            }
            FlowSample smp;
            smp.s = i * h;
            smp.x1 = y[0];
            smp.x2 = y[1];
            smp.t = y[2];
            smp.position = pos;
            smp.lambda = e.lambda;
            smp.u = e.u_primary();
            smp.v = e.v_of_t(tol.fd_step_t, tol);
            double ud = detail::u_direct_signed(spec, e, tol.fd_step_omega, tol);
            if (!have_track && ud < 0.0) {  // u > 0 normalization at the start
                e.pf.e1 = -e.pf.e1;
                ud = -ud;
            }
            track = e.pf;
            have_track = true;
            smp.u_over_lambda2 = ud / (e.lambda * e.lambda);
            if (!have_q0) {
                q0 = smp.u_over_lambda2;
                have_q0 = true;
            }
            out.conservation_drift =
                std::max(out.conservation_drift, std::abs(smp.u_over_lambda2 - q0));
            out.samples.push_back(smp);
        }
        if (i == steps) break;

        auto at = [&](const std::array<double, 3>& base,
                      const std::array<double, 3>& dir, double scale) {
            return std::array<double, 3>{base[0] + scale * dir[0],
                                         base[1] + scale * dir[1],
                                         base[2] + scale * dir[2]};
        };
        const auto k2 = field(at(y, k1, 0.5 * h), nullptr);
        const auto k3 = field(at(y, k2, 0.5 * h), nullptr);
        const auto k4 = field(at(y, k3, h), nullptr);
        for (int c = 0; c < 3; ++c)
            y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    }
    return out;
}

/// Forward integration of v' = v^2 + 1 until |v| exceeds 1e6; the escape
/// time converges to pi/2 - arctan(v0) as the step shrinks.
inline BlowupResult blowup_demo(double v0, double step) {
    if (!(step > 0.0)) throw ConfigError("blowup step must be positive");
    BlowupResult out;
    const double threshold = 1e6;
    auto f = [](double v) { return v * v + 1.0; };
    double s = 0.0, v = v0;
    const long est_steps = static_cast<long>(20.0 / step) + 1;
    const long stride = std::max<long>(1, est_steps / 4096);
    long i = 0;
    while (std::abs(v) <= threshold && std::isfinite(v) && s < 20.0) {
        if (i % stride == 0) out.profile.emplace_back(s, v);
        const double k1 = f(v);
        const double k2 = f(v + 0.5 * step * k1);
        const double k3 = f(v + 0.5 * step * k2);
        const double k4 = f(v + step * k3);
        v += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s += step;
        ++i;
    }
    out.profile.emplace_back(s, v);
    out.blowup_estimate = s;
    return out;
}

}  // namespace polarmap
