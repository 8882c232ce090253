#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "polarmap/immersion.hpp"
#include "polarmap/linalg.hpp"

using namespace polarmap;

namespace {

Vec5 make(double a, double b, double c, double d, double e) {
    Vec5 v;
    v.c = {a, b, c, d, e};
    return v;
}

}  // namespace

TEST_CASE("gram_schmidt leaves an orthonormal pair unchanged") {
    const std::vector<Vec5> in{make(1, 0, 0, 0, 0), make(0, 0, 1, 0, 0)};
    const auto out = gram_schmidt(in);
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 5; ++i)
            CHECK(std::abs(out[k][i] - in[k][i]) < 1e-14);
}

TEST_CASE("gram_schmidt closed-form pair") {
    const auto out = gram_schmidt({make(1, 0, 0, 0, 0), make(1, 1, 0, 0, 0)});
    CHECK(std::abs(out[0][0] - 1.0) < 1e-15);
    CHECK(std::abs(out[1][1] - 1.0) < 1e-15);
    for (int i : {1, 2, 3, 4}) CHECK(std::abs(out[0][i]) < 1e-15);
    for (int i : {0, 2, 3, 4}) CHECK(std::abs(out[1][i]) < 1e-15);
}

TEST_CASE("gram_schmidt rejects dependent input") {
    CHECK_THROWS_AS(gram_schmidt({make(1, 2, 0, 0, 0), make(2, 4, 0, 0, 0)}),
                    RankError);
}

TEST_CASE("orthonormalize output is orthonormal on random spans") {
    oracles::Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Vec5> in;
        const int k = rng.integer(1, 4);
        for (int i = 0; i < k; ++i) {
            Vec5 v;
            for (int j = 0; j < 5; ++j) v[j] = rng.uniform(-1.0, 1.0);
            in.push_back(v);
        }
        std::vector<Vec5> out;
        try {
            out = orthonormalize(in);
        } catch (const RankError&) {
            continue;  // the random span may be numerically degenerate
        }
        for (std::size_t i = 0; i < out.size(); ++i)
            for (std::size_t j = 0; j < out.size(); ++j)
                CHECK(std::abs(dot(out[i], out[j]) - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("complement completion at a Veronese point") {
    const auto& spec = gallery("veronese");
    const auto jets = eval_jet(spec, 1.2, 0.8);
    const Vec5 g = value_of(jets);
    const Vec5 d1 = partial_of(jets, 0), d2 = partial_of(jets, 1);
    const std::vector<Vec5> seeds{make(1, 0, 0, 0, 0), make(0, 1, 0, 0, 0),
                                  make(0, 0, 1, 0, 0), make(0, 0, 0, 1, 0),
                                  make(0, 0, 0, 0, 1)};
    const auto comp = orthonormalize({g, d1, d2}, &seeds);
    REQUIRE(comp.size() == 2);
    for (const Vec5& w : comp) {
        CHECK(std::abs(dot(w, g)) < 1e-12);
        CHECK(std::abs(dot(w, d1)) < 1e-12);
        CHECK(std::abs(dot(w, d2)) < 1e-12);
    }
    CHECK(std::abs(dot(comp[0], comp[1])) < 1e-12);
    CHECK(std::abs(norm(comp[0]) - 1.0) < 1e-12);
}

TEST_CASE("sym_eigen on a diagonal matrix") {
    const Mat<2> m{{{3.0, 0.0}, {0.0, 1.0}}};
    const auto e = sym_eigen<2>(m);
    CHECK(e.eigenvalues[0] == Catch::Approx(3.0));
    CHECK(e.eigenvalues[1] == Catch::Approx(1.0));
}

TEST_CASE("sym_eigen closed form for traceless symmetric 2x2") {
    oracles::Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
        const Mat<2> m{{{a, b}, {b, -a}}};
        const auto e = sym_eigen<2>(m);
        const double r = std::hypot(a, b);
        CHECK(std::abs(e.eigenvalues[0] - r) < 1e-12 * std::max(1.0, r));
        CHECK(std::abs(e.eigenvalues[1] + r) < 1e-12 * std::max(1.0, r));
    }
}

TEST_CASE("sym_eigen roots satisfy the characteristic polynomial") {
    oracles::Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        Mat<3> m{};
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) m[i][j] = m[j][i] = rng.uniform(-3, 3);
        const auto e = sym_eigen<3>(m);
        // p(x) = -x^3 + tr x^2 - c2 x + det, evaluated by cofactors
        const double tr = m[0][0] + m[1][1] + m[2][2];
        const double c2 = m[0][0] * m[1][1] - m[0][1] * m[1][0] +
                          m[0][0] * m[2][2] - m[0][2] * m[2][0] +
                          m[1][1] * m[2][2] - m[1][2] * m[2][1];
        const double d = det<3>(m);
        for (double x : e.eigenvalues) {
            const double p = -x * x * x + tr * x * x - c2 * x + d;
            CHECK(std::abs(p) < 1e-9 * std::max(1.0, std::abs(x * x * x)));
        }
    }
}

TEST_CASE("sym_eigen reconstructs the matrix and keeps vectors orthonormal") {
    oracles::Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        Mat<3> m{};
        double scale = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                m[i][j] = m[j][i] = rng.uniform(-5, 5);
                scale = std::max(scale, std::abs(m[i][j]));
            }
        const auto e = sym_eigen<3>(m);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double recon = 0.0, vv = 0.0;
                for (int k = 0; k < 3; ++k) {
                    recon += e.eigenvectors[i][k] * e.eigenvalues[k] *
                             e.eigenvectors[j][k];
                    vv += e.eigenvectors[k][i] * e.eigenvectors[k][j];
                }
                CHECK(std::abs(recon - m[i][j]) < 1e-10 * std::max(1.0, scale));
                CHECK(std::abs(vv - (i == j ? 1.0 : 0.0)) < 1e-12);
            }
        CHECK(e.eigenvalues[0] >= e.eigenvalues[1]);
        CHECK(e.eigenvalues[1] >= e.eigenvalues[2]);
    }
}

TEST_CASE("sym_eigen handles degenerate spectra deterministically") {
    const Mat<3> eye = identity<3>();
    const auto e1 = sym_eigen<3>(eye);
    const auto e2 = sym_eigen<3>(eye);
    for (int i = 0; i < 3; ++i) {
        CHECK(e1.eigenvalues[i] == 1.0);
        for (int j = 0; j < 3; ++j)
            CHECK(e1.eigenvectors[i][j] == e2.eigenvectors[i][j]);
    }
}

TEST_CASE("eigenvector sign rule: first significant component positive") {
    const Mat<2> m{{{0.0, 1.0}, {1.0, 0.0}}};
    const auto e = sym_eigen<2>(m);
    CHECK(e.eigenvectors[0][0] > 0.0);  // both columns normalized to +first
    CHECK(e.eigenvectors[0][1] > 0.0);
}

TEST_CASE("solve inverts small systems") {
    const Mat<3> m{{{2, 1, 0}, {1, 3, 1}, {0, 1, 4}}};
    const std::array<double, 3> b{1.0, 2.0, 3.0};
    const auto x = solve<3>(m, b);
    for (int i = 0; i < 3; ++i) {
        double acc = 0.0;
        for (int j = 0; j < 3; ++j) acc += m[i][j] * x[j];
        CHECK(acc == Catch::Approx(b[i]).margin(1e-13));
    }
}
