#pragma once

#include <algorithm>
#include <numeric>

#include "gmrf/ordering.hpp"
#include "gmrf/sparse.hpp"

namespace gmrf {

namespace detail {

inline std::uint64_t pattern_fingerprint(const SparsityPattern& p) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](index v) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 1099511628211ull;
    };
    mix(p.n);
    for (index v : p.col_ptr) mix(v);
    for (index v : p.row_idx) mix(v);
    return h;
}

}  // namespace detail

struct EliminationTree {
    std::vector<index> parent;     // parent column in permuted order, -1 for roots
    std::vector<index> postorder;  // valid topological order, children before parents
};

/// One-time analysis of a pattern under a permutation. Holds everything a
/// numeric factorization needs, and is reusable for any matrix with the
/// same pattern: the upper-triangle layout of P*Q*P' is cached together
/// with a gather map from the original value array.
struct SymbolicFactor {
    index n = 0;
    Permutation p;
    EliminationTree tree;

    // pattern of L: compressed columns, diagonal first, rows ascending
    std::vector<index> l_col_ptr;
    std::vector<index> l_row_idx;
    std::vector<index> col_count;  // entries per column of L

    // permuted upper-triangle layout: column k lists row k of the lower
    // triangle of P*Q*P' (indices j <= k ascending, the diagonal last)
    std::vector<index> u_col_ptr;
    std::vector<index> u_row_idx;
    std::vector<index> u_source;  // position in the original value array

    std::uint64_t pattern_hash = 0;  // fingerprint of the analyzed pattern

    index nnz_l() const { return l_col_ptr.empty() ? 0 : l_col_ptr.back(); }
};

inline SymbolicFactor analyze(const SymmetricSparseMatrix& q, Permutation p) {
    const index n = q.n();
    if (p.n() != n) throw DimensionMismatch("analyze: permutation size mismatch");

    SymbolicFactor s;
    s.n = n;
    s.p = std::move(p);
    s.pattern_hash = detail::pattern_fingerprint(q.pattern);

    // permuted upper layout with the source map
    s.u_col_ptr.assign(n + 1, 0);
    for (index j = 0; j < n; ++j) {
        for (index t = q.pattern.col_ptr[j]; t < q.pattern.col_ptr[j + 1]; ++t) {
            index i = q.pattern.row_idx[t];
            index r = s.p.inverse[i], c = s.p.inverse[j];
            ++s.u_col_ptr[std::max(r, c) + 1];
        }
    }
    std::partial_sum(s.u_col_ptr.begin(), s.u_col_ptr.end(), s.u_col_ptr.begin());
    s.u_row_idx.resize(s.u_col_ptr.back());
    s.u_source.resize(s.u_col_ptr.back());
    {
        std::vector<index> next(s.u_col_ptr.begin(), s.u_col_ptr.end() - 1);
        for (index j = 0; j < n; ++j) {
            for (index t = q.pattern.col_ptr[j]; t < q.pattern.col_ptr[j + 1]; ++t) {
                index i = q.pattern.row_idx[t];
                index r = s.p.inverse[i], c = s.p.inverse[j];
                index k = std::max(r, c);
                index pos = next[k]++;
                s.u_row_idx[pos] = std::min(r, c);
                s.u_source[pos] = t;
            }
        }
        for (index k = 0; k < n; ++k) {
            // sort (row, source) pairs within the column
            index b = s.u_col_ptr[k], e = s.u_col_ptr[k + 1];
            std::vector<std::pair<index, index>> tmp;
            tmp.reserve(e - b);
            for (index t = b; t < e; ++t) tmp.emplace_back(s.u_row_idx[t], s.u_source[t]);
            std::sort(tmp.begin(), tmp.end());
            for (index t = b; t < e; ++t) {
                s.u_row_idx[t] = tmp[t - b].first;
                s.u_source[t] = tmp[t - b].second;
            }
        }
    }

    // elimination tree by climbing with path compression
    s.tree.parent.assign(n, -1);
    {
        std::vector<index> ancestor(n, -1);
        for (index k = 0; k < n; ++k) {
            for (index t = s.u_col_ptr[k]; t < s.u_col_ptr[k + 1]; ++t) {
                index j = s.u_row_idx[t];
                while (j != -1 && j < k) {
                    index jn = ancestor[j];
                    ancestor[j] = k;
                    if (jn == -1) s.tree.parent[j] = k;
                    j = jn;
                }
            }
        }
    }

    // postorder, children visited in ascending order
    {
        std::vector<index> child_head(n, -1), child_next(n, -1);
        for (index j = 0; j < n; ++j) {
            index par = s.tree.parent[j];
            if (par >= 0) {
                // later pushes land at the head, so each chain runs descending
                child_next[j] = child_head[par];
                child_head[par] = j;
            }
        }
        s.tree.postorder.reserve(n);
        std::vector<index> stack;
        for (index r = 0; r < n; ++r) {
            if (s.tree.parent[r] != -1) continue;
            stack.push_back(~r);
            while (!stack.empty()) {
                index t = stack.back();
                stack.pop_back();
                if (t < 0) {
                    index u = ~t;
                    stack.push_back(u);
                    // descending chain pushes leave the smallest child on top
                    for (index c = child_head[u]; c >= 0; c = child_next[c]) stack.push_back(~c);
                } else {
                    s.tree.postorder.push_back(t);
                }
            }
        }
    }

    // column counts and the fill pattern: every row subtree walk marks the
    // columns that receive an entry of that row
    s.col_count.assign(n, 1);  // diagonal
    {
        std::vector<index> stamp(n, -1);
        for (index k = 0; k < n; ++k) {
            stamp[k] = k;
            for (index t = s.u_col_ptr[k]; t < s.u_col_ptr[k + 1]; ++t) {
                index j = s.u_row_idx[t];
                while (j < k && stamp[j] != k) {
                    stamp[j] = k;
                    ++s.col_count[j];
                    j = s.tree.parent[j];
                }
            }
        }
    }
    s.l_col_ptr.assign(n + 1, 0);
    for (index j = 0; j < n; ++j) s.l_col_ptr[j + 1] = s.l_col_ptr[j] + s.col_count[j];
    s.l_row_idx.resize(s.l_col_ptr.back());
    {
        std::vector<index> next(n);
        for (index j = 0; j < n; ++j) {
            next[j] = s.l_col_ptr[j] + 1;
            s.l_row_idx[s.l_col_ptr[j]] = j;
        }
        std::vector<index> stamp(n, -1);
        for (index k = 0; k < n; ++k) {
            stamp[k] = k;
            for (index t = s.u_col_ptr[k]; t < s.u_col_ptr[k + 1]; ++t) {
                index j = s.u_row_idx[t];
                while (j < k && stamp[j] != k) {
                    stamp[j] = k;
                    s.l_row_idx[next[j]++] = k;
                    j = s.tree.parent[j];
                }
            }
        }
    }
    return s;
}

}  // namespace gmrf
