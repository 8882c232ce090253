// Acceptance gate: one line per criterion, exit 0 only if all pass.
// Tolerances are fixed here, not configurable.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "polarmap/suites.hpp"

using namespace polarmap;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
const double kSqrt3 = std::sqrt(3.0);

int g_failures = 0;

void report(int id, bool pass, const char* what, double metric) {
    std::printf("[%s] C%-2d %s (metric = %.3e)\n", pass ? "PASS" : "FAIL", id,
                what, metric);
    if (!pass) ++g_failures;
}

struct Sampler {
    std::mt19937_64 rng{0x5EED5EED};
    const ImmersionSpec& spec;
    explicit Sampler(const ImmersionSpec& s) : spec(s) {}
    std::array<double, 3> bundle() {
        const auto& d = spec.domain;
        const double p1 = 0.05 * (d.hi1() - d.lo1());
        const double p2 = 0.05 * (d.hi2() - d.lo2());
        std::uniform_real_distribution<double> u1(d.lo1() + p1, d.hi1() - p1);
        std::uniform_real_distribution<double> u2(d.lo2() + p2, d.hi2() - p2);
        std::uniform_real_distribution<double> ut(0.0, kTwoPi);
        return {u1(rng), u2(rng), ut(rng)};
    }
};

// C1: golden principal curvatures (sqrt(3), 0, -sqrt(3)) and S = 6 on the
// polar image of the veronese, at 1000 random regular bundle points,
// within the stated tolerances and under the runtime budget.
void criterion_1() {
    const auto& spec = gallery("veronese");
    Sampler smp(spec);
    const auto start = std::chrono::steady_clock::now();
    double worst_k = 0.0, worst_s = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const auto p = smp.bundle();
        const SurfaceData sd = surface_data(spec, p[0], p[1]);
        const HypersurfaceShape hs = hypersurface_shape(sd, p[2]);
        worst_k = std::max({worst_k, std::abs(hs.k1 - kSqrt3) / kSqrt3,
                            std::abs(hs.k2) / kSqrt3,
                            std::abs(hs.k3 + kSqrt3) / kSqrt3});
        worst_s = std::max(worst_s, std::abs(hs.S - 6.0));
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    report(1, worst_k < 1e-7 && worst_s < 1e-6 && seconds < 10.0,
           "Cartan golden values (sqrt3, 0, -sqrt3), S = 6", worst_k);
}

// C2: Gauss-Kronecker curvature vanishes at all sampled regular points of
// every gallery entry with nonvanishing normal curvature.
void criterion_2() {
    const auto& spec = gallery("veronese");  // the Kn != 0 gallery entry
    Sampler smp(spec);
    double worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const auto p = smp.bundle();
        const SurfaceData sd = surface_data(spec, p[0], p[1]);
        const HypersurfaceShape hs = hypersurface_shape(sd, p[2]);
        worst = std::max(worst, std::abs(hs.K_GK) / (hs.k1 * hs.k1 * hs.k1));
    }
    report(2, worst < 1e-9, "zero Gauss-Kronecker: |K| < 1e-9 k1^3", worst);
}

// C3: first-principles eigenvalue matches 1/sqrt(r) on a 32x32x32 grid.
void criterion_3() {
    const auto& spec = gallery("veronese");
    const auto& d = spec.domain;
    const double p1 = 0.05 * (d.hi1() - d.lo1());
    const double p2 = 0.05 * (d.hi2() - d.lo2());
    double worst = 0.0;
    std::optional<AdaptedFrame> row_start;
    for (int i = 0; i < 32; ++i) {
        std::optional<AdaptedFrame> prev = row_start;
        for (int j = 0; j < 32; ++j) {
            const double x1 = d.lo1() + p1 + (d.hi1() - d.lo1() - 2 * p1) * i / 31.0;
            const double x2 = d.lo2() + p2 + (d.hi2() - d.lo2() - 2 * p2) * j / 31.0;
            const SurfaceData sd =
                surface_data(spec, x1, x2, prev ? &*prev : nullptr);
            if (j == 0) row_start = sd.frame;
            prev = sd.frame;
            for (int k = 0; k < 32; ++k) {
                const double t = kTwoPi * k / 32.0;
                const double r = regularity_of(sd.shape, t);
                const HypersurfaceShape hs = hypersurface_shape(sd, t);
                worst = std::max(worst, std::abs(hs.k1 * std::sqrt(r) - 1.0));
            }
        }
    }
    report(3, worst < 1e-7, "principal-curvature formula k1 = 1/sqrt(r)", worst);
}

// C4: regularity dichotomy: min_t r > 0.3 on the veronese everywhere,
// r(pi/2) = 0 on the clifford torus.
void criterion_4() {
    const auto& ver = gallery("veronese");
    const auto& d = ver.domain;
    double min_r = 1e300;
    for (int i = 0; i < 32; ++i) {
        for (int j = 0; j < 32; ++j) {
            const double x1 = d.lo1() + 0.05 + (d.hi1() - d.lo1() - 0.1) * i / 31.0;
            const double x2 = d.lo2() + 0.05 + (d.hi2() - d.lo2() - 0.1) * j / 31.0;
            const SurfaceData sd = surface_data(ver, x1, x2);
            for (int k = 0; k < 64; ++k)
                min_r = std::min(min_r, regularity_of(sd.shape, kTwoPi * k / 64.0));
        }
    }
    const auto& cli = gallery("clifford");
    Sampler smp(cli);
    double worst_singular = 0.0;
    for (int n = 0; n < 32; ++n) {
        const auto p = smp.bundle();
        const SurfaceData sd = surface_data(cli, p[0], p[1]);
        worst_singular =
            std::max(worst_singular, regularity_of(sd.shape, 0.5 * kPi));
    }
    report(4, min_r > 0.3 && worst_singular <= 1e-12,
           "regularity: min_t r > 0.3 (veronese), r(pi/2) = 0 (clifford)",
           min_r);
}

// C5: the curvature bridge between the base surface and (lambda, u, v).
void criterion_5() {
    const auto& spec = gallery("veronese");
    Sampler smp(spec);
    double worst = 0.0;
    for (int n = 0; n < 48; ++n) {
        const auto p = smp.bundle();
        const QuotientShape q = quotient_shape(spec, p[0], p[1], p[2]);
        const SurfaceData sd = surface_data(spec, p[0], p[1]);
        worst = std::max({worst, std::abs(sd.curv.K - q.K_recovered),
                          std::abs(sd.curv.Kn * sd.curv.Kn - q.Kn2_recovered)});
    }
    report(5, worst < 1e-6, "curvature bridge K, Kn^2 vs (lambda, u, v)", worst);
}

// C6: the rigidity conclusion at desk scale: u = 1, v = 0 on the
// superminimal veronese input.
void criterion_6() {
    const auto& spec = gallery("veronese");
    Sampler smp(spec);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
        const auto p = smp.bundle();
        const FrameInvariants fi = lambda_u_v(spec, p[0], p[1], p[2]);
        worst = std::max({worst, std::abs(fi.u - 1.0), std::abs(fi.v)});
    }
    report(6, worst < 1e-5, "superminimal conclusion |u-1|, |v| < 1e-5", worst);
}

// C7: frame-system residuals at h = 1e-4 with observed convergence order
// >= 1, plus the algebraic identity on 1e6 random pairs.
void criterion_7() {
    const auto& spec = gallery("veronese");
    Sampler smp(spec);
    double worst = 0.0;
    std::array<double, 3> ps{};
    for (int n = 0; n < 8; ++n) {
        const auto p = smp.bundle();
        ps = p;
        const FrameInvariants fi =
            frame_equation_residuals(spec, p[0], p[1], p[2], 1e-4);
        for (double r : fi.residual_22) worst = std::max(worst, r);
        for (double r : fi.residual_23) worst = std::max(worst, r);
    }
    auto worst_at = [&](double h) {
        const FrameInvariants fi =
            frame_equation_residuals(spec, ps[0], ps[1], ps[2], h);
        double w = 0.0;
        for (double r : fi.residual_22) w = std::max(w, r);
        for (double r : fi.residual_23) w = std::max(w, r);
        return w;
    };
    const double r_coarse = worst_at(4e-2), r_fine = worst_at(2e-2);
    const bool order_ok = r_coarse / r_fine >= 2.0;

    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> uv(-10.0, 10.0);
    double worst_id = 0.0;
    for (long n = 0; n < 1000000; ++n) {
        const double u = uv(rng), v = uv(rng);
        const double h = (u - 1) * (u - 1) + v * v;
        const double lhs =
            4 * u * u * v * v + (v * v - u * u + 1) * (v * v - u * u + 1);
        worst_id = std::max(worst_id, std::abs(lhs - (h * h + 4 * u * h)));
    }
    report(7, worst < 1e-3 && order_ok && worst_id < 1e-10,
           "frame equations < 1e-3, order >= 1, identity < 1e-10", worst);
}

// C8: conservation along e2 pointwise and along flows; harmonicity of u, v.
void criterion_8() {
    const auto& spec = gallery("veronese");
    Sampler smp(spec);
    double worst_cons = 0.0, worst_harm = 0.0;
    for (int n = 0; n < 8; ++n) {
        const auto p = smp.bundle();
        const Lemma1Result r = lemma1_checks(spec, p[0], p[1], p[2], 1e-3);
        worst_cons = std::max(worst_cons, r.conservation_residual);
        worst_harm = std::max({worst_harm, r.harmonic_residual_u,
                               r.harmonic_residual_v});
    }
    const auto p = smp.bundle();
    const FlowResult fl = flow_e2(spec, p[0], p[1], p[2], kTwoPi, 1500);
    report(8,
           worst_cons < 1e-4 && fl.conservation_drift < 1e-6 &&
               worst_harm < 1e-3,
           "conservation < 1e-4, flow drift < 1e-6, harmonicity < 1e-3",
           std::max({worst_cons, fl.conservation_drift, worst_harm}));
}

// C9: the e2 integral curves are great circles: planar and 2*pi periodic.
void criterion_9() {
    const auto& spec = gallery("veronese");
    Sampler smp(spec);
    double worst_planar = 0.0, worst_closure = 0.0;
    for (int n = 0; n < 4; ++n) {
        const auto p = smp.bundle();
        const FlowResult fl = flow_e2(spec, p[0], p[1], p[2], kTwoPi, 1500);
        worst_planar = std::max(worst_planar, fl.planarity);
        worst_closure = std::max(worst_closure, fl.closure);
    }
    report(9, worst_planar < 1e-6 && worst_closure < 1e-8,
           "geodesic claim: planarity < 1e-6, closure < 1e-8",
           std::max(worst_planar, worst_closure));
}

// C10: the Riccati blow-up times match pi/2 - arctan(v0).
void criterion_10() {
    double worst = 0.0;
    for (double v0 : {-10.0, 0.0, 1.0}) {
        const BlowupResult r = blowup_demo(v0, 1e-5);
        worst = std::max(worst,
                         std::abs(r.blowup_estimate - (0.5 * kPi - std::atan(v0))));
    }
    report(10, worst < 1e-3, "blow-up times match pi/2 - arctan(v0)", worst);
}

// C11: conformal curvature value and its saturated lower bound.
void criterion_11() {
    const auto& spec = gallery("veronese");
    Sampler smp(spec);
    std::vector<double> s_values;
    struct Row {
        double u, v, K;
    };
    std::vector<Row> rows;
    for (int n = 0; n < 48; ++n) {
        const auto p = smp.bundle();
        const FrameInvariants fi = lambda_u_v(spec, p[0], p[1], p[2]);
        const SurfaceData sd = surface_data(spec, p[0], p[1]);
        const HypersurfaceShape hs = hypersurface_shape(sd, p[2]);
        rows.push_back({fi.u, fi.v, sd.curv.K});
        s_values.push_back(hs.S);
    }
    const double khat_ref = 0.38157141418444396;  // 1 / (3 (2/3)^(1/3))
    double worst_val = 0.0, worst_bound = 0.0, worst_sat = 0.0;
    for (const Row& r : rows) {
        const TheoremQuantities tq = theorem_quantities(
            r.u, r.v, r.K, std::span<const double>(s_values.data(), s_values.size()));
        worst_val = std::max(worst_val, std::abs(tq.K_hat - khat_ref));
        worst_bound = std::max(worst_bound, tq.K_hat_bound - tq.K_hat);
        worst_sat = std::max(worst_sat, std::abs(tq.K_hat - tq.K_hat_bound));
    }
    report(11, worst_val < 1e-6 && worst_bound < 1e-9 && worst_sat < 1e-9,
           "conformal curvature 0.38157... and saturated bound",
           std::max(worst_val, worst_sat));
}

// C12: curvature-equation residual on the veronese and second-order
// convergence of the discrete operator on a synthetic field.
void criterion_12() {
    const auto& spec = gallery("veronese");
    Sampler smp(spec);
    double worst = 0.0;
    for (int n = 0; n < 8; ++n) {
        const auto p = smp.bundle();
        worst = std::max(worst, pde_residual_21(spec, p[0], p[1], 1e-2));
    }
    const MetricFn2 metric = [](double x1, double) {
        Mat<2> g{};
        g[0][0] = 3.0;
        g[1][1] = 3.0 * std::sin(x1) * std::sin(x1);
        return g;
    };
    const ScalarFn2 f = [](double x1, double) { return std::cos(x1); };
    const double exact = -2.0 * std::cos(1.1) / 3.0;
    const double r1 = std::abs(laplace_beltrami_chart2(metric, f, 1.1, 0.4, 2e-2) - exact);
    const double r2 = std::abs(laplace_beltrami_chart2(metric, f, 1.1, 0.4, 1e-2) - exact);
    const double ratio = r1 / r2;
    report(12, worst < 1e-6 && ratio > 3.5 && ratio < 4.5,
           "curvature equation residual < 1e-6, O(h^2) stencil", worst);
}

}  // namespace

int main() {
    std::printf("acceptance: polar-map hypersurface toolkit\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    if (g_failures == 0) {
        std::printf("all 12 criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
}
