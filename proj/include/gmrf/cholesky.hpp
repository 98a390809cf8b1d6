#pragma once

#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <thread>

#include "gmrf/symbolic.hpp"

namespace gmrf {

namespace detail {

/// Partition of the elimination tree into disjoint subtree tasks plus the
/// sequential top region. Row order inside a task and inside the top region
/// is ascending, which fixes the accumulation order independently of the
/// worker count.
struct TreeSchedule {
    std::vector<std::vector<index>> tasks;  // sorted by descending size
    std::vector<index> top;                 // rows not covered by a task
};

inline TreeSchedule tree_schedule(const std::vector<index>& parent, index n, int cores) {
    TreeSchedule sched;
    if (cores <= 1 || n < 256) {
        sched.top.resize(n);
        std::iota(sched.top.begin(), sched.top.end(), index{0});
        return sched;
    }
    std::vector<index> sz(n, 1);
    for (index j = 0; j < n; ++j)
        if (parent[j] >= 0) sz[parent[j]] += sz[j];

    const index threshold = std::max<index>(128, n / (static_cast<index>(cores) * 8));
    std::vector<index> task_of(n, -1);
    for (index j = n - 1; j >= 0; --j) {
        bool is_root = sz[j] <= threshold && (parent[j] < 0 || sz[parent[j]] > threshold);
        if (is_root)
            task_of[j] = j;
        else if (parent[j] >= 0)
            task_of[j] = task_of[parent[j]];
    }
    std::vector<index> task_slot(n, -1);
    for (index j = 0; j < n; ++j) {
        index r = task_of[j];
        if (r < 0) {
            sched.top.push_back(j);
            continue;
        }
        if (task_slot[r] < 0) {
            task_slot[r] = static_cast<index>(sched.tasks.size());
            sched.tasks.emplace_back();
        }
        sched.tasks[task_slot[r]].push_back(j);
    }
    std::sort(sched.tasks.begin(), sched.tasks.end(),
              [](const auto& a, const auto& b) { return a.size() > b.size(); });
    return sched;
}

/// Run tasks on up to `cores` workers. `fn(task_index, worker_index)`.
template <typename Fn>
void run_tasks(index n_tasks, int cores, Fn&& fn) {
    int workers = static_cast<int>(std::min<index>(cores, n_tasks));
    if (workers <= 1) {
        for (index t = 0; t < n_tasks; ++t) fn(t, 0);
        return;
    }
    std::atomic<index> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (;;) {
                index t = next.fetch_add(1);
                if (t >= n_tasks) break;
                fn(t, w);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

inline std::shared_ptr<const SymbolicFactor> analyze_shared(const SymmetricSparseMatrix& q,
                                                            const Permutation& p) {
    return std::make_shared<const SymbolicFactor>(analyze(q, p));
}

struct CholeskyFactor {
    std::shared_ptr<const SymbolicFactor> symbolic;
    std::vector<double> l_values;

    index n() const { return symbolic->n; }
    index nnz_l() const { return symbolic->nnz_l(); }
    double diag(index k) const { return l_values[symbolic->l_col_ptr[k]]; }
};

namespace detail {

struct FactorWorkspace {
    std::vector<double> x;
    std::vector<index> stamp;
    std::vector<index> reach;

    explicit FactorWorkspace(index n) : x(n, 0.0), stamp(n, -1) { reach.reserve(64); }
};

/// Up-looking kernel for one row of L. Reads and writes stay inside the
/// elimination subtree rooted at k, which is what makes disjoint-subtree
/// parallelism race-free and bit-reproducible.
inline void factorize_row(const SymbolicFactor& s, const std::vector<double>& cvals,
                          std::vector<double>& lx, std::vector<index>& cursor, double pivot_tol,
                          FactorWorkspace& ws, index k) {
    ws.reach.clear();
    double d = 0.0;
    for (index t = s.u_col_ptr[k]; t < s.u_col_ptr[k + 1]; ++t) {
        index j = s.u_row_idx[t];
        double v = cvals[t];
        if (j == k) {
            d = v;
            continue;
        }
        ws.x[j] = v;
        while (j < k && ws.stamp[j] != k) {
            ws.stamp[j] = k;
            ws.reach.push_back(j);
            j = s.tree.parent[j];
        }
    }
    std::sort(ws.reach.begin(), ws.reach.end());

    for (index j : ws.reach) {
        double xj = ws.x[j];
        ws.x[j] = 0.0;
        double lkj = xj / lx[s.l_col_ptr[j]];
        for (index p = s.l_col_ptr[j] + 1; p < cursor[j]; ++p) ws.x[s.l_row_idx[p]] -= lx[p] * lkj;
        d -= lkj * lkj;
        lx[cursor[j]++] = lkj;
    }
    if (!(d > pivot_tol)) throw NotPositiveDefinite(s.p.perm[k]);
    lx[s.l_col_ptr[k]] = std::sqrt(d);
}

}  // namespace detail

/// Numeric factorization P*Q*P' = L*L'. The result is bit-identical for any
/// `cores` value.
inline CholeskyFactor factorize(const SymmetricSparseMatrix& q,
                                std::shared_ptr<const SymbolicFactor> symbolic, int cores = 1) {
    const SymbolicFactor& s = *symbolic;
    if (q.n() != s.n || detail::pattern_fingerprint(q.pattern) != s.pattern_hash)
        throw DimensionMismatch("factorize: matrix does not match the symbolic pattern");

    std::vector<double> cvals(s.u_source.size());
    double maxdiag = 0.0;
    for (std::size_t t = 0; t < cvals.size(); ++t) cvals[t] = q.values[s.u_source[t]];
    for (index k = 0; k < s.n; ++k) maxdiag = std::max(maxdiag, cvals[s.u_col_ptr[k + 1] - 1]);
    const double pivot_tol = 1e-13 * maxdiag;

    CholeskyFactor f;
    f.symbolic = std::move(symbolic);
    f.l_values.assign(s.nnz_l(), 0.0);
    std::vector<index> cursor(s.n);
    for (index j = 0; j < s.n; ++j) cursor[j] = s.l_col_ptr[j] + 1;

    detail::TreeSchedule sched = detail::tree_schedule(s.tree.parent, s.n, cores);
    if (!sched.tasks.empty()) {
        int workers = static_cast<int>(std::min<std::size_t>(cores, sched.tasks.size()));
        std::vector<detail::FactorWorkspace> ws;
        ws.reserve(workers);
        for (int w = 0; w < workers; ++w) ws.emplace_back(s.n);
        std::exception_ptr error;
        std::mutex error_mu;
        detail::run_tasks(static_cast<index>(sched.tasks.size()), cores, [&](index t, int w) {
            try {
                for (index k : sched.tasks[t])
                    detail::factorize_row(s, cvals, f.l_values, cursor, pivot_tol, ws[w], k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
            }
        });
        if (error) std::rethrow_exception(error);
    }
    detail::FactorWorkspace ws(s.n);
    for (index k : sched.top) detail::factorize_row(s, cvals, f.l_values, cursor, pivot_tol, ws, k);
    return f;
}

inline CholeskyFactor factorize(const SymmetricSparseMatrix& q, OrderingScheme scheme, int cores = 1) {
    return factorize(q, analyze_shared(q, order(q, scheme)), cores);
}

/// Solve L x = b in permuted coordinates.
inline DenseVector solve_lower(const CholeskyFactor& f, DenseVector b) {
    const SymbolicFactor& s = *f.symbolic;
    if (static_cast<index>(b.size()) != s.n) throw DimensionMismatch("solve_lower: dimension mismatch");
    for (index j = 0; j < s.n; ++j) {
        double xj = b[j] / f.l_values[s.l_col_ptr[j]];
        b[j] = xj;
        for (index p = s.l_col_ptr[j] + 1; p < s.l_col_ptr[j + 1]; ++p)
            b[s.l_row_idx[p]] -= f.l_values[p] * xj;
    }
    return b;
}

/// Solve L' x = b in permuted coordinates.
inline DenseVector solve_upper(const CholeskyFactor& f, DenseVector b) {
    const SymbolicFactor& s = *f.symbolic;
    if (static_cast<index>(b.size()) != s.n) throw DimensionMismatch("solve_upper: dimension mismatch");
    for (index j = s.n - 1; j >= 0; --j) {
        double acc = b[j];
        for (index p = s.l_col_ptr[j] + 1; p < s.l_col_ptr[j + 1]; ++p)
            acc -= f.l_values[p] * b[s.l_row_idx[p]];
        b[j] = acc / f.l_values[s.l_col_ptr[j]];
    }
    return b;
}

/// Solve Q x = b in original coordinates: permute, both triangular solves,
/// permute back.
inline DenseVector solve_full(const CholeskyFactor& f, const DenseVector& b) {
    const SymbolicFactor& s = *f.symbolic;
    if (static_cast<index>(b.size()) != s.n) throw DimensionMismatch("solve_full: dimension mismatch");
    DenseVector pb(b.size());
    for (index k = 0; k < s.n; ++k) pb[k] = b[s.p.perm[k]];
    DenseVector y = solve_upper(f, solve_lower(f, std::move(pb)));
    DenseVector x(b.size());
    for (index k = 0; k < s.n; ++k) x[s.p.perm[k]] = y[k];
    return x;
}

inline DenseMatrix solve_lower(const CholeskyFactor& f, const DenseMatrix& b) {
    DenseMatrix r(b.rows, b.cols);
    for (index c = 0; c < b.cols; ++c) {
        DenseVector col(b.col(c), b.col(c) + b.rows);
        DenseVector x = solve_lower(f, std::move(col));
        std::copy(x.begin(), x.end(), r.col(c));
    }
    return r;
}

inline DenseMatrix solve_upper(const CholeskyFactor& f, const DenseMatrix& b) {
    DenseMatrix r(b.rows, b.cols);
    for (index c = 0; c < b.cols; ++c) {
        DenseVector col(b.col(c), b.col(c) + b.rows);
        DenseVector x = solve_upper(f, std::move(col));
        std::copy(x.begin(), x.end(), r.col(c));
    }
    return r;
}

inline DenseMatrix solve_full(const CholeskyFactor& f, const DenseMatrix& b) {
    DenseMatrix r(b.rows, b.cols);
    for (index c = 0; c < b.cols; ++c) {
        DenseVector col(b.col(c), b.col(c) + b.rows);
        DenseVector x = solve_full(f, col);
        std::copy(x.begin(), x.end(), r.col(c));
    }
    return r;
}

/// log |Q| = 2 * sum(log L_ii). Permutation invariant.
inline double logdet(const CholeskyFactor& f) {
    double acc = 0.0;
    for (index k = 0; k < f.n(); ++k) acc += std::log(f.diag(k));
    return 2.0 * acc;
}

}  // namespace gmrf
