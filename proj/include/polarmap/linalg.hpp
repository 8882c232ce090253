#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "polarmap/config.hpp"
#include "polarmap/errors.hpp"

namespace polarmap {

/// Ambient coordinates of R^5.
struct Vec5 {
    std::array<double, 5> c{0.0, 0.0, 0.0, 0.0, 0.0};

    double& operator[](int i) { return c[i]; }
    double operator[](int i) const { return c[i]; }
};

inline Vec5 operator+(const Vec5& a, const Vec5& b) {
    Vec5 r;
    for (int i = 0; i < 5; ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
}

inline Vec5 operator-(const Vec5& a, const Vec5& b) {
    Vec5 r;
    for (int i = 0; i < 5; ++i) r.c[i] = a.c[i] - b.c[i];
    return r;
}

inline Vec5 operator-(const Vec5& a) {
    Vec5 r;
    for (int i = 0; i < 5; ++i) r.c[i] = -a.c[i];
    return r;
}

inline Vec5 operator*(double s, const Vec5& a) {
    Vec5 r;
    for (int i = 0; i < 5; ++i) r.c[i] = s * a.c[i];
    return r;
}

inline Vec5 operator*(const Vec5& a, double s) { return s * a; }
inline Vec5 operator/(const Vec5& a, double s) { return (1.0 / s) * a; }

inline double dot(const Vec5& a, const Vec5& b) {
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += a.c[i] * b.c[i];
    return s;
}

inline double norm(const Vec5& a) { return std::sqrt(dot(a, a)); }

inline Vec5 normalized(const Vec5& a) { return a / norm(a); }

inline Vec5 axis5(int i) {
    Vec5 r;
    r.c[i] = 1.0;
    return r;
}

template <int N>
using Mat = std::array<std::array<double, N>, N>;

template <int N>
Mat<N> identity() {
    Mat<N> m{};
    for (int i = 0; i < N; ++i) m[i][i] = 1.0;
    return m;
}

/// Eigen-decomposition of a symmetric matrix: eigenvalues sorted
/// descending, eigenvectors as columns, each with its first component of
/// magnitude above sign_eps made positive.
template <int N>
struct SymEigen {
    std::array<double, N> eigenvalues{};
    Mat<N> eigenvectors{};  // column j belongs to eigenvalues[j]
};

namespace detail {

// one cyclic Jacobi sweep; returns the remaining off-diagonal mass
template <int N>
double jacobi_sweep(Mat<N>& a, Mat<N>& v) {
    for (int p = 0; p < N - 1; ++p) {
        for (int q = p + 1; q < N; ++q) {
            const double apq = a[p][q];
            if (apq == 0.0) continue;
            const double theta = 0.5 * (a[q][q] - a[p][p]) / apq;
            const double t = (theta >= 0.0)
                                 ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                 : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
            const double c = 1.0 / std::sqrt(1.0 + t * t);
            const double s = t * c;
            for (int k = 0; k < N; ++k) {
                const double akp = a[k][p], akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for (int k = 0; k < N; ++k) {
                const double apk = a[p][k], aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for (int k = 0; k < N; ++k) {
                const double vkp = v[k][p], vkq = v[k][q];
                v[k][p] = c * vkp - s * vkq;
                v[k][q] = s * vkp + c * vkq;
            }
        }
    }
    double off = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) off += a[i][j] * a[i][j];
    return off;
}

}  // namespace detail

template <int N>
SymEigen<N> sym_eigen(const Mat<N>& input, double sign_eps = Tolerances{}.sign_eps) {
    // symmetrize; callers are contracted to pass matrices symmetric to
    // 1e-12 relative, degeneracies are fine
    Mat<N> a;
    double scale = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            a[i][j] = 0.5 * (input[i][j] + input[j][i]);
            scale = std::max(scale, std::abs(a[i][j]));
        }
    Mat<N> v = identity<N>();
    const double stop = (scale > 0.0) ? scale * scale * 1e-32 : 0.0;
    for (int sweep = 0; sweep < 64; ++sweep) {
        if (detail::jacobi_sweep<N>(a, v) <= stop) break;
    }

    std::array<int, N> order;
    for (int i = 0; i < N; ++i) order[i] = i;
    for (int i = 0; i < N - 1; ++i)  // stable selection sort, descending
        for (int j = i + 1; j < N; ++j)
            if (a[order[j]][order[j]] > a[order[i]][order[i]])
                std::swap(order[i], order[j]);

    SymEigen<N> out;
    for (int j = 0; j < N; ++j) {
        out.eigenvalues[j] = a[order[j]][order[j]];
        double flip = 1.0;
        for (int i = 0; i < N; ++i) {
            if (std::abs(v[i][order[j]]) > sign_eps) {
                flip = (v[i][order[j]] < 0.0) ? -1.0 : 1.0;
                break;
            }
        }
        for (int i = 0; i < N; ++i) out.eigenvectors[i][j] = flip * v[i][order[j]];
    }
    return out;
}

template <int N>
double det(Mat<N> m) {
    double d = 1.0;
    for (int col = 0; col < N; ++col) {
        int pivot = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        if (m[pivot][col] == 0.0) return 0.0;
        if (pivot != col) {
            std::swap(m[pivot], m[col]);
            d = -d;
        }
        d *= m[col][col];
        for (int r = col + 1; r < N; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int cc = col; cc < N; ++cc) m[r][cc] -= f * m[col][cc];
        }
    }
    return d;
}

/// Solve a small symmetric positive-definite system by Gaussian
/// elimination with partial pivoting.
template <int N>
std::array<double, N> solve(Mat<N> m, std::array<double, N> b) {
    for (int col = 0; col < N; ++col) {
        int pivot = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        if (m[pivot][col] == 0.0) throw RankError("singular linear system");
        if (pivot != col) {
            std::swap(m[pivot], m[col]);
            std::swap(b[pivot], b[col]);
        }
        for (int r = col + 1; r < N; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int cc = col; cc < N; ++cc) m[r][cc] -= f * m[col][cc];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (int r = N - 1; r >= 0; --r) {
        double s = b[r];
        for (int cc = r + 1; cc < N; ++cc) s -= m[r][cc] * x[cc];
        x[r] = s / m[r][r];
    }
    return x;
}

namespace detail {

inline Vec5 project_off(Vec5 w, const std::vector<Vec5>& basis) {
    for (const Vec5& b : basis) w = w - dot(w, b) * b;
    return w;
}

}  // namespace detail

/// Gram-Schmidt with re-orthogonalization. Throws RankError when the Gram
/// determinant of the input falls below gram_det_min.
inline std::vector<Vec5> gram_schmidt(const std::vector<Vec5>& in,
                                      double gram_det_min = Tolerances{}.gram_det_min) {
    const int k = static_cast<int>(in.size());
    if (k == 0) return {};
    if (k > 5) throw RankError("more than five vectors in R^5");

    std::vector<std::vector<double>> gram(k, std::vector<double>(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) gram[i][j] = dot(in[i], in[j]);
    double d = 1.0;  // Gaussian elimination determinant on the Gram matrix
    {
        auto g = gram;
        for (int col = 0; col < k; ++col) {
            int pivot = col;
            for (int r = col + 1; r < k; ++r)
                if (std::abs(g[r][col]) > std::abs(g[pivot][col])) pivot = r;
            if (pivot != col) {
                std::swap(g[pivot], g[col]);
                d = -d;
            }
            d *= g[col][col];
            if (g[col][col] == 0.0) break;
            for (int r = col + 1; r < k; ++r) {
                const double f = g[r][col] / g[col][col];
                for (int cc = col; cc < k; ++cc) g[r][cc] -= f * g[col][cc];
            }
        }
    }
    if (!(d > gram_det_min)) throw RankError("Gram determinant below threshold");

    std::vector<Vec5> out;
    out.reserve(k);
    for (const Vec5& v : in) {
        Vec5 w = detail::project_off(v, out);
        w = detail::project_off(w, out);  // second pass restores orthogonality
        out.push_back(normalized(w));
    }
    return out;
}

/// Completes `base` (orthonormal) to a larger orthonormal set using the
/// seeds in order; a seed whose residual is too small is replaced by the
/// standard basis vector with the largest residual. Returns only the new
/// vectors.
inline std::vector<Vec5> complete_complement(
    const std::vector<Vec5>& base, const std::vector<Vec5>& seeds, int count,
    double residual_min = Tolerances{}.complement_residual_min,
    double sign_eps = Tolerances{}.sign_eps) {
    std::vector<Vec5> all = base;
    std::vector<Vec5> added;
    auto try_add = [&](const Vec5& cand) -> bool {
        Vec5 w = detail::project_off(cand, all);
        if (norm(w) <= residual_min) return false;
        w = detail::project_off(w, all);
        all.push_back(normalized(w));
        added.push_back(all.back());
        return true;
    };
    for (const Vec5& s : seeds) {
        if (static_cast<int>(added.size()) == count) break;
        try_add(s);
    }
    while (static_cast<int>(added.size()) < count) {
        // fall back to the axis with the largest residual; fix its sign
        int best = -1;
        double best_norm = 0.0;
        for (int i = 0; i < 5; ++i) {
            const double n = norm(detail::project_off(axis5(i), all));
            if (n > best_norm + 1e-15) {
                best_norm = n;
                best = i;
            }
        }
        if (best < 0 || best_norm <= residual_min)
            throw RankError("cannot complete orthonormal set");
        Vec5 w = normalized(detail::project_off(
            detail::project_off(axis5(best), all), all));
        for (int i = 0; i < 5; ++i) {
            if (std::abs(w[i]) > sign_eps) {
                if (w[i] < 0.0) w = -w;
                break;
            }
        }
        all.push_back(w);
        added.push_back(w);
    }
    return added;
}

/// Gram-Schmidt of `vectors`; with seeds given, instead returns an
/// orthonormal basis of the orthogonal complement of their span, built
/// from the seeds.
inline std::vector<Vec5> orthonormalize(
    const std::vector<Vec5>& vectors,
    const std::vector<Vec5>* seed_complement = nullptr,
    double gram_det_min = Tolerances{}.gram_det_min) {
    std::vector<Vec5> basis = gram_schmidt(vectors, gram_det_min);
    if (seed_complement == nullptr) return basis;
    const int want = 5 - static_cast<int>(basis.size());
    return complete_complement(basis, *seed_complement, want);
}

}  // namespace polarmap
