#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "polarmap/surface.hpp"

using namespace polarmap;

namespace {

std::array<double, 2> random_point(const ImmersionSpec& spec, oracles::Rng& rng,
                                   double pad_frac = 0.03) {
    const auto& d = spec.domain;
    const double p1 = pad_frac * (d.hi1() - d.lo1());
    const double p2 = pad_frac * (d.hi2() - d.lo2());
    return {rng.uniform(d.lo1() + p1, d.hi1() - p1),
            rng.uniform(d.lo2() + p2, d.hi2() - p2)};
}

double frame_ortho_residual(const Vec5& g, const AdaptedFrame& f) {
    const Vec5* v[5] = {&g, &f.v1, &f.v2, &f.v3, &f.v4};
    double worst = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            worst = std::max(worst,
                             std::abs(dot(*v[i], *v[j]) - (i == j ? 1.0 : 0.0)));
    return worst;
}

double angle_between(const Vec5& a, const Vec5& b) {
    return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

}  // namespace

TEST_CASE("adapted frame is orthonormal at random veronese points") {
    oracles::Rng rng(41);
    const auto& spec = gallery("veronese");
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_point(spec, rng);
        const auto jets = eval_jet(spec, p[0], p[1]);
        const AdaptedFrame f = adapted_frame(spec, p[0], p[1]);
        REQUIRE(frame_ortho_residual(value_of(jets), f) < 1e-10);
        CHECK_FALSE(f.ambiguous);
    }
}

TEST_CASE("clifford torus has the constant fifth normal direction") {
    oracles::Rng rng(43);
    const auto& spec = gallery("clifford");
    for (int trial = 0; trial < 30; ++trial) {
        const auto p = random_point(spec, rng);
        const AdaptedFrame f = adapted_frame(spec, p[0], p[1]);
        CHECK(std::abs(std::abs(f.v4[4]) - 1.0) < 1e-12);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(f.v4[i]) < 1e-12);
    }
}

TEST_CASE("frame continuation varies continuously across a grid") {
    const auto& spec = gallery("veronese");
    // 64x64 patch with spacing at most 0.05 in both axes
    const int n = 64;
    const double h1 = 0.04, h2 = 0.05;
    const double x10 = 0.25, x20 = 0.1;
    double worst = 0.0;
    std::optional<AdaptedFrame> row_start;
    for (int i = 0; i < n; ++i) {
        std::optional<AdaptedFrame> prev = row_start;
        for (int j = 0; j < n; ++j) {
            const AdaptedFrame f = adapted_frame(spec, x10 + i * h1, x20 + j * h2,
                                                 prev ? &*prev : nullptr);
            if (prev) {
                worst = std::max({worst, angle_between(f.v1, prev->v1),
                                  angle_between(f.v2, prev->v2),
                                  angle_between(f.v3, prev->v3),
                                  angle_between(f.v4, prev->v4)});
            }
            if (j == 0) row_start = f;
            prev = f;
        }
    }
    CHECK(worst < 0.2);
}

TEST_CASE("veronese shape entries split the curvature equally") {
    oracles::Rng rng(47);
    const auto& spec = gallery("veronese");
    for (int trial = 0; trial < 40; ++trial) {
        const auto p = random_point(spec, rng);
        const AdaptedFrame f = adapted_frame(spec, p[0], p[1]);
        const ShapeData s = shape_operators(spec, p[0], p[1], f);
        CHECK(std::abs(s.a * s.a + s.b * s.b - 1.0 / 3.0) < 1e-8);
        CHECK(std::abs(s.c * s.c - 1.0 / 3.0) < 1e-8);
        CHECK(s.c >= 0.0);
    }
}

TEST_CASE("clifford shape entries are (1, 0, 0) up to frame sign") {
    oracles::Rng rng(53);
    const auto& spec = gallery("clifford");
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_point(spec, rng);
        const AdaptedFrame f = adapted_frame(spec, p[0], p[1]);
        const ShapeData s = shape_operators(spec, p[0], p[1], f);
        CHECK(std::abs(std::abs(s.a) - 1.0) < 1e-12);
        CHECK(std::abs(s.b) < 1e-12);
        CHECK(std::abs(s.c) < 1e-12);
        CHECK(std::abs(s.omega34[0]) < 1e-8);
        CHECK(std::abs(s.omega34[1]) < 1e-8);
    }
}

TEST_CASE("totally geodesic points are flagged, with zero shape data") {
    const auto& spec = gallery("geodesic2");
    const AdaptedFrame f = adapted_frame(spec, 1.2, 2.0);
    CHECK(f.ambiguous);
    const ShapeData s = shape_operators(spec, 1.2, 2.0, f);
    CHECK(std::abs(s.a) < 1e-10);
    CHECK(std::abs(s.b) < 1e-10);
    CHECK(std::abs(s.c) < 1e-10);
    CHECK(s.trace_residual < 1e-10);
}

TEST_CASE("curvature formulas on the gallery") {
    const auto& ver = gallery("veronese");
    const SurfaceData sv = surface_data(ver, 1.3, 2.1);
    CHECK(std::abs(sv.curv.K - 1.0 / 3.0) < 1e-10);
    CHECK(std::abs(std::abs(sv.curv.Kn) - 2.0 / 3.0) < 1e-10);
    CHECK(std::abs(sv.curv.defect) < 1e-8);
    CHECK(std::abs(sv.curv.mu - 1.0 / std::sqrt(3.0)) < 1e-10);

    const SurfaceData sc = surface_data(gallery("clifford"), 1.0, 2.0);
    CHECK(std::abs(sc.curv.K) < 1e-12);
    CHECK(std::abs(sc.curv.Kn) < 1e-12);
    CHECK(std::abs(sc.curv.defect - 1.0) < 1e-12);
    CHECK(std::abs(sc.curv.S_g - 2.0) < 1e-12);

    ShapeData geod;  // a = b = c = 0
    const SurfaceCurvatures cg = curvatures(geod);
    CHECK(cg.K == 1.0);
    CHECK(cg.Kn == 0.0);
    CHECK(cg.defect == 0.0);
}

TEST_CASE("S_g = 2(1-K) holds exactly by construction") {
    oracles::Rng rng(59);
    for (int trial = 0; trial < 200; ++trial) {
        ShapeData s;
        s.a = rng.uniform(-2, 2);
        s.b = rng.uniform(-2, 2);
        s.c = rng.uniform(0, 2);
        const SurfaceCurvatures c = curvatures(s);
        CHECK(c.S_g == 2.0 * (1.0 - c.K));
        CHECK(c.Kn * c.Kn <= (1.0 - c.K) * (1.0 - c.K) + 1e-12);
    }
}

TEST_CASE("invariants are stable under a normal gauge rotation") {
    oracles::Rng rng(61);
    const auto& spec = gallery("veronese");
    for (int trial = 0; trial < 15; ++trial) {
        const auto p = random_point(spec, rng);
        const AdaptedFrame f = adapted_frame(spec, p[0], p[1]);
        const SurfaceCurvatures base =
            curvatures(shape_operators(spec, p[0], p[1], f));
        const double beta = rng.uniform(0.0, 6.28);
        const AdaptedFrame rot = rotate_normal_gauge(spec, p[0], p[1], f, beta);
        const SurfaceCurvatures moved =
            curvatures(shape_operators(spec, p[0], p[1], rot));
        CHECK(std::abs(base.K - moved.K) < 1e-9);
        CHECK(std::abs(base.Kn * base.Kn - moved.Kn * moved.Kn) < 1e-9);
        CHECK(std::abs(base.S_g - moved.S_g) < 1e-9);
        CHECK(std::abs(base.defect - moved.defect) < 1e-9);
    }
}

TEST_CASE("normal curvature bound holds on every gallery entry") {
    oracles::Rng rng(67);
    for (const char* name : {"veronese", "clifford", "geodesic2"}) {
        const auto& spec = gallery(name);
        for (int trial = 0; trial < 40; ++trial) {
            const auto p = random_point(spec, rng);
            const SurfaceData sd = surface_data(spec, p[0], p[1]);
            CHECK(sd.curv.defect > -1e-10);
            if (spec.claims_minimal) CHECK(sd.shape.trace_residual < 1e-8);
        }
    }
}

TEST_CASE("curvature equation residual vanishes on the veronese") {
    oracles::Rng rng(71);
    const auto& spec = gallery("veronese");
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_point(spec, rng, 0.06);
        CHECK(pde_residual_21(spec, p[0], p[1], 1e-2) < 1e-6);
    }
}

TEST_CASE("curvature equation guards its singular set and preconditions") {
    CHECK_THROWS_AS(pde_residual_21(gallery("geodesic2"), 1.3, 2.0, 1e-2),
                    NearFlatError);
    CHECK_THROWS_AS(pde_residual_21(gallery("clifford"), 1.3, 2.0, 1e-2),
                    DomainError);
}

TEST_CASE("chart Laplace-Beltrami converges at second order") {
    // round sphere of radius sqrt(3): metric diag(3, 3 sin^2), f = cos(x1),
    // exact Laplacian -2 cos(x1) / 3
    const MetricFn2 metric = [](double x1, double) {
        Mat<2> g{};
        g[0][0] = 3.0;
        g[1][1] = 3.0 * std::sin(x1) * std::sin(x1);
        return g;
    };
    const ScalarFn2 f = [](double x1, double) { return std::cos(x1); };
    const double x1 = 1.1, x2 = 0.4;
    const double exact = -2.0 * std::cos(x1) / 3.0;
    const double r1 =
        std::abs(laplace_beltrami_chart2(metric, f, x1, x2, 2e-2) - exact);
    const double r2 =
        std::abs(laplace_beltrami_chart2(metric, f, x1, x2, 1e-2) - exact);
    const double ratio = r1 / r2;
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("laplace-beltrami handles non-diagonal chart metrics") {
    // pulled-back flat metric under (x, y) -> (x + y/2, y): constant
    // non-diagonal Gram; Laplacian of a quadratic is constant and known
    const Mat<2> g{{{1.0, 0.5}, {0.5, 1.25}}};
    const MetricFn2 metric = [&](double, double) { return g; };
    // f(x, y) = u^2 + v^2 with u = x + y/2, v = y is the flat squared
    // radius, whose flat Laplacian is 4
    const ScalarFn2 f = [](double x, double y) {
        const double u = x + 0.5 * y, v = y;
        return u * u + v * v;
    };
    const double got = laplace_beltrami_chart2(metric, f, 0.3, -0.2, 1e-3);
    CHECK(std::abs(got - 4.0) < 1e-8);
}
