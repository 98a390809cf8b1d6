#pragma once

// Dense reference implementations used as independent oracles. Everything
// here is O(n^3)-style textbook code on purpose: it shares no code path
// with the sparse kernels it checks.

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "gmrf/sparse.hpp"

namespace oracle {

using gmrf::index;

struct Dense {
    index n = 0, m = 0;
    std::vector<double> a;  // row-major

    Dense() = default;
    Dense(index rows, index cols) : n(rows), m(cols), a(static_cast<std::size_t>(rows * cols), 0.0) {}

    double& at(index i, index j) { return a[static_cast<std::size_t>(i * m + j)]; }
    double at(index i, index j) const { return a[static_cast<std::size_t>(i * m + j)]; }
};

inline Dense to_dense(const gmrf::SymmetricSparseMatrix& q) {
    Dense d(q.n(), q.n());
    for (index j = 0; j < q.n(); ++j) {
        for (index p = q.pattern.col_ptr[j]; p < q.pattern.col_ptr[j + 1]; ++p) {
            index i = q.pattern.row_idx[p];
            d.at(i, j) = q.values[p];
            d.at(j, i) = q.values[p];
        }
    }
    return d;
}

inline Dense to_dense(const gmrf::ProjectionMatrix& a) {
    Dense d(a.rows, a.cols);
    for (index r = 0; r < a.rows; ++r)
        for (index p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) d.at(r, a.col_idx[p]) = a.values[p];
    return d;
}

inline Dense matmul(const Dense& x, const Dense& y) {
    if (x.m != y.n) throw std::invalid_argument("oracle matmul shape");
    Dense z(x.n, y.m);
    for (index i = 0; i < x.n; ++i)
        for (index k = 0; k < x.m; ++k) {
            double v = x.at(i, k);
            if (v == 0.0) continue;
            for (index j = 0; j < y.m; ++j) z.at(i, j) += v * y.at(k, j);
        }
    return z;
}

inline Dense transpose(const Dense& x) {
    Dense z(x.m, x.n);
    for (index i = 0; i < x.n; ++i)
        for (index j = 0; j < x.m; ++j) z.at(j, i) = x.at(i, j);
    return z;
}

inline Dense add(const Dense& x, const Dense& y, double alpha = 1.0, double beta = 1.0) {
    Dense z(x.n, x.m);
    for (std::size_t k = 0; k < z.a.size(); ++k) z.a[k] = alpha * x.a[k] + beta * y.a[k];
    return z;
}

inline Dense kron(const Dense& x, const Dense& y) {
    Dense z(x.n * y.n, x.m * y.m);
    for (index i = 0; i < x.n; ++i)
        for (index j = 0; j < x.m; ++j)
            for (index k = 0; k < y.n; ++k)
                for (index l = 0; l < y.m; ++l)
                    z.at(i * y.n + k, j * y.m + l) = x.at(i, j) * y.at(k, l);
    return z;
}

/// Textbook dense Cholesky, lower triangle.
inline Dense cholesky(const Dense& q) {
    Dense l(q.n, q.n);
    for (index j = 0; j < q.n; ++j) {
        double d = q.at(j, j);
        for (index k = 0; k < j; ++k) d -= l.at(j, k) * l.at(j, k);
        if (!(d > 0.0)) throw std::runtime_error("oracle cholesky: not positive definite");
        l.at(j, j) = std::sqrt(d);
        for (index i = j + 1; i < q.n; ++i) {
            double s = q.at(i, j);
            for (index k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
            l.at(i, j) = s / l.at(j, j);
        }
    }
    return l;
}

inline std::vector<double> solve(const Dense& q, std::vector<double> b) {
    Dense l = cholesky(q);
    for (index i = 0; i < q.n; ++i) {
        for (index k = 0; k < i; ++k) b[i] -= l.at(i, k) * b[k];
        b[i] /= l.at(i, i);
    }
    for (index i = q.n - 1; i >= 0; --i) {
        for (index k = i + 1; k < q.n; ++k) b[i] -= l.at(k, i) * b[k];
        b[i] /= l.at(i, i);
    }
    return b;
}

inline Dense inverse(const Dense& q) {
    Dense inv(q.n, q.n);
    for (index j = 0; j < q.n; ++j) {
        std::vector<double> e(q.n, 0.0);
        e[j] = 1.0;
        std::vector<double> x = solve(q, std::move(e));
        for (index i = 0; i < q.n; ++i) inv.at(i, j) = x[i];
    }
    return inv;
}

inline double logdet(const Dense& q) {
    Dense l = cholesky(q);
    double acc = 0.0;
    for (index i = 0; i < q.n; ++i) acc += std::log(l.at(i, i));
    return 2.0 * acc;
}

/// Fill count |pattern(L)| for a given elimination order, by boolean dense
/// elimination of the permuted adjacency structure.
inline index symbolic_fill_count(const gmrf::SparsityPattern& p, const std::vector<index>& perm) {
    const index n = p.n;
    std::vector<index> inv(n);
    for (index k = 0; k < n; ++k) inv[perm[k]] = k;
    std::vector<std::vector<char>> a(n, std::vector<char>(n, 0));
    for (index j = 0; j < n; ++j) {
        for (index q = p.col_ptr[j]; q < p.col_ptr[j + 1]; ++q) {
            index i = p.row_idx[q];
            index r = inv[i], c = inv[j];
            a[std::max(r, c)][std::min(r, c)] = 1;
        }
    }
    for (index k = 0; k < n; ++k) a[k][k] = 1;
    index count = 0;
    for (index k = 0; k < n; ++k) {
        for (index i = k; i < n; ++i) {
            if (!a[i][k]) continue;
            ++count;
            for (index j = i + 1; j < n; ++j)
                if (a[j][k]) a[j][i] = 1;
        }
    }
    return count;
}

/// Numerical rank by Gauss elimination with full pivoting.
inline index rank(Dense x, double tol = 1e-9) {
    index r = 0;
    for (index step = 0; step < std::min(x.n, x.m); ++step) {
        index pi = -1, pj = -1;
        double best = 0.0;
        for (index i = step; i < x.n; ++i)
            for (index j = step; j < x.m; ++j)
                if (std::abs(x.at(i, j)) > best) {
                    best = std::abs(x.at(i, j));
                    pi = i;
                    pj = j;
                }
        if (best <= tol) break;
        for (index j = 0; j < x.m; ++j) std::swap(x.at(step, j), x.at(pi, j));
        for (index i = 0; i < x.n; ++i) std::swap(x.at(i, step), x.at(i, pj));
        ++r;
        for (index i = step + 1; i < x.n; ++i) {
            double f = x.at(i, step) / x.at(step, step);
            for (index j = step; j < x.m; ++j) x.at(i, j) -= f * x.at(step, j);
        }
    }
    return r;
}

/// Random sparse SPD matrix: random off-diagonal pattern, values in
/// [-1, 1], diagonal dominant by construction.
inline gmrf::SymmetricSparseMatrix random_spd(index n, double density, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> v(-1.0, 1.0);
    std::vector<gmrf::Triplet> trips;
    std::vector<double> rowsum(n, 0.0);
    for (index j = 0; j < n; ++j) {
        for (index i = j + 1; i < n; ++i) {
            if (u(gen) < density) {
                double w = v(gen);
                trips.push_back({i, j, w});
                rowsum[i] += std::abs(w);
                rowsum[j] += std::abs(w);
            }
        }
    }
    for (index j = 0; j < n; ++j) trips.push_back({j, j, rowsum[j] + 0.5 + u(gen)});
    return gmrf::symmetric_from_triplets(n, std::move(trips));
}

/// 5-point Laplacian on an nx-by-ny grid, optionally shifted to be SPD.
inline gmrf::SymmetricSparseMatrix grid_laplacian(index nx, index ny, double shift = 0.1) {
    std::vector<gmrf::Triplet> trips;
    auto id = [nx](index i, index j) { return j * nx + i; };
    for (index j = 0; j < ny; ++j) {
        for (index i = 0; i < nx; ++i) {
            double deg = 0.0;
            if (i + 1 < nx) {
                trips.push_back({id(i + 1, j), id(i, j), -1.0});
                deg += 1.0;
            }
            if (i > 0) deg += 1.0;
            if (j + 1 < ny) {
                trips.push_back({id(i, j + 1), id(i, j), -1.0});
                deg += 1.0;
            }
            if (j > 0) deg += 1.0;
            trips.push_back({id(i, j), id(i, j), deg + shift});
        }
    }
    return gmrf::symmetric_from_triplets(nx * ny, std::move(trips));
}

inline gmrf::SymmetricSparseMatrix tridiagonal(index n, double diag = 2.1, double off = -1.0) {
    std::vector<gmrf::Triplet> trips;
    for (index i = 0; i < n; ++i) {
        trips.push_back({i, i, diag});
        if (i + 1 < n) trips.push_back({i + 1, i, off});
    }
    return gmrf::symmetric_from_triplets(n, std::move(trips));
}

inline std::vector<double> random_vector(index n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> v(-2.0, 2.0);
    std::vector<double> x(n);
    for (auto& e : x) e = v(gen);
    return x;
}

inline double max_abs(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace oracle
