#pragma once

#include "gmrf/cholesky.hpp"

namespace gmrf {

/// Entries of the inverse at every position of pattern(L), a superset of
/// pattern(Q), reported in original ordering.
struct SelectedInverse {
    SymmetricSparseMatrix matrix;

    double get(index i, index j) const { return matrix.get(i, j); }
    DenseVector diagonal() const { return matrix.diagonal(); }
};

namespace detail {

/// Working form of the selected inverse in permuted coordinates: the
/// symmetrized pattern of L with values, diagonal position per column.
struct SelinvWork {
    std::vector<index> col_ptr;
    std::vector<index> row_idx;
    std::vector<index> diag_pos;
    std::vector<double> values;
};

inline void selinv_column(const SymbolicFactor& s, const std::vector<double>& lx, SelinvWork& zw,
                          std::vector<index>& lmunch, std::vector<double>& z, index j) {
    // scatter the (already final) lower part of column j
    for (index p = zw.diag_pos[j]; p < zw.col_ptr[j + 1]; ++p) z[zw.row_idx[p]] = zw.values[p];

    // entries above the diagonal, last row first: each needs the ones below it
    for (index p = zw.diag_pos[j] - 1; p >= zw.col_ptr[j]; --p) {
        index k = zw.row_idx[p];
        const double dk = lx[s.l_col_ptr[k]];
        double acc = 0.0;
        for (index q = s.l_col_ptr[k] + 1; q < s.l_col_ptr[k + 1]; ++q)
            acc -= (lx[q] / dk) * z[s.l_row_idx[q]];
        z[k] = acc;
    }

    // push this column's contribution down into every column k with L(j,k) != 0
    for (index p = zw.diag_pos[j] - 1; p >= zw.col_ptr[j]; --p) {
        index k = zw.row_idx[p];
        if (lmunch[k] <= s.l_col_ptr[k] || s.l_row_idx[lmunch[k]] != j) continue;
        double ljk = lx[lmunch[k]--] / lx[s.l_col_ptr[k]];
        for (index zp = zw.diag_pos[k]; zp < zw.col_ptr[k + 1]; ++zp)
            zw.values[zp] -= z[zw.row_idx[zp]] * ljk;
    }

    for (index p = zw.col_ptr[j]; p < zw.col_ptr[j + 1]; ++p) {
        zw.values[p] = z[zw.row_idx[p]];
        z[zw.row_idx[p]] = 0.0;
    }
}

inline SelinvWork selected_inverse_work(const CholeskyFactor& f, int cores) {
    const SymbolicFactor& s = *f.symbolic;
    const index n = s.n;

    SelinvWork zw;
    zw.col_ptr.assign(n + 1, 0);
    zw.diag_pos.resize(n);
    {
        std::vector<index> upper(n, 0);
        for (index j = 0; j < n; ++j)
            for (index p = s.l_col_ptr[j] + 1; p < s.l_col_ptr[j + 1]; ++p) ++upper[s.l_row_idx[p]];
        for (index j = 0; j < n; ++j) zw.col_ptr[j + 1] = zw.col_ptr[j] + upper[j] + s.col_count[j];
        zw.row_idx.resize(zw.col_ptr[n]);
        std::vector<index> next(n);
        for (index j = 0; j < n; ++j) {
            next[j] = zw.col_ptr[j];
            zw.diag_pos[j] = zw.col_ptr[j] + upper[j];
        }
        // transposed strict entries first (rows below the diagonal of Z'),
        // then the column of L itself; both sweeps keep rows ascending
        for (index k = 0; k < n; ++k)
            for (index p = s.l_col_ptr[k] + 1; p < s.l_col_ptr[k + 1]; ++p)
                zw.row_idx[next[s.l_row_idx[p]]++] = k;
        for (index j = 0; j < n; ++j)
            for (index p = s.l_col_ptr[j]; p < s.l_col_ptr[j + 1]; ++p) zw.row_idx[next[j]++] = s.l_row_idx[p];
    }

    zw.values.assign(zw.row_idx.size(), 0.0);
    for (index j = 0; j < n; ++j) {
        double djj = f.l_values[s.l_col_ptr[j]];
        zw.values[zw.diag_pos[j]] = 1.0 / (djj * djj);
    }

    std::vector<index> lmunch(n);
    for (index k = 0; k < n; ++k) lmunch[k] = s.l_col_ptr[k + 1] - 1;

    TreeSchedule sched = tree_schedule(s.tree.parent, n, cores);

    // the top of the tree first, from the last column down
    std::vector<double> z(n, 0.0);
    for (auto it = sched.top.rbegin(); it != sched.top.rend(); ++it)
        selinv_column(s, f.l_values, zw, lmunch, z, *it);

    if (!sched.tasks.empty()) {
        int workers = static_cast<int>(std::min<std::size_t>(cores, sched.tasks.size()));
        std::vector<std::vector<double>> zs(workers, std::vector<double>(n, 0.0));
        run_tasks(static_cast<index>(sched.tasks.size()), cores, [&](index t, int w) {
            const auto& rows = sched.tasks[t];
            for (auto it = rows.rbegin(); it != rows.rend(); ++it)
                selinv_column(s, f.l_values, zw, lmunch, zs[w], *it);
        });
    }
    return zw;
}

}  // namespace detail

/// Marginal variances diag(Q^-1) in original ordering.
inline DenseVector marginal_variances(const CholeskyFactor& f, int cores = 1) {
    detail::SelinvWork zw = detail::selected_inverse_work(f, cores);
    const SymbolicFactor& s = *f.symbolic;
    DenseVector d(s.n);
    for (index j = 0; j < s.n; ++j) d[s.p.perm[j]] = zw.values[zw.diag_pos[j]];
    return d;
}

/// Backward Takahashi recursion over pattern(L), exact up to roundoff at
/// every stored position.
inline SelectedInverse selected_inverse(const CholeskyFactor& f, int cores = 1) {
    detail::SelinvWork zw = detail::selected_inverse_work(f, cores);
    const SymbolicFactor& s = *f.symbolic;

    std::vector<Triplet> trips;
    trips.reserve(s.nnz_l());
    for (index j = 0; j < s.n; ++j)
        for (index p = zw.diag_pos[j]; p < zw.col_ptr[j + 1]; ++p)
            trips.push_back({s.p.perm[zw.row_idx[p]], s.p.perm[j], zw.values[p]});

    SelectedInverse si;
    si.matrix = symmetric_from_triplets(s.n, std::move(trips));
    return si;
}

}  // namespace gmrf
