#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>
#include <utility>

#include "gmrf/types.hpp"

namespace gmrf {

/// Sparsity structure of the lower triangle (diagonal included) in
/// compressed-column form. Row indices are strictly increasing within a
/// column and every diagonal position is stored, so the diagonal is always
/// the first entry of its column. Patterns are immutable once built and are
/// shared by every matrix with the same structure.
struct SparsityPattern {
    index n = 0;
    std::vector<index> col_ptr;  // size n+1
    std::vector<index> row_idx;  // size nnz, rows >= column, sorted

    index nnz() const { return col_ptr.empty() ? 0 : col_ptr.back(); }

    /// Position of entry (i, j) with i >= j, or -1 if not stored.
    index find(index i, index j) const {
        auto first = row_idx.begin() + col_ptr[j];
        auto last = row_idx.begin() + col_ptr[j + 1];
        auto it = std::lower_bound(first, last, i);
        if (it == last || *it != i) return -1;
        return it - row_idx.begin();
    }

    bool operator==(const SparsityPattern&) const = default;

    void validate() const {
        if (static_cast<index>(col_ptr.size()) != n + 1)
            throw std::invalid_argument("pattern: column pointer array must have length n+1");
        if (col_ptr.front() != 0 || !std::is_sorted(col_ptr.begin(), col_ptr.end()))
            throw std::invalid_argument("pattern: column pointers must be nondecreasing from 0");
        if (col_ptr.back() != static_cast<index>(row_idx.size()))
            throw std::invalid_argument("pattern: last column pointer must equal entry count");
        for (index j = 0; j < n; ++j) {
            index p = col_ptr[j];
            index pend = col_ptr[j + 1];
            if (p == pend || row_idx[p] != j)
                throw std::invalid_argument("pattern: missing diagonal in column " + std::to_string(j));
            for (; p + 1 < pend; ++p)
                if (row_idx[p] >= row_idx[p + 1] || row_idx[p + 1] >= n)
                    throw std::invalid_argument("pattern: rows must be strictly increasing and in range");
        }
    }
};

/// Symmetric sparse matrix in model units (precision). Only the lower
/// triangle is stored; symmetry holds by representation.
struct SymmetricSparseMatrix {
    SparsityPattern pattern;
    std::vector<double> values;

    index n() const { return pattern.n; }
    index nnz() const { return pattern.nnz(); }

    /// Value at (i, j), either triangle; zero if outside the pattern.
    double get(index i, index j) const {
        if (i < j) std::swap(i, j);
        index p = pattern.find(i, j);
        return p < 0 ? 0.0 : values[static_cast<std::size_t>(p)];
    }

    DenseVector diagonal() const {
        DenseVector d(static_cast<std::size_t>(n()));
        for (index j = 0; j < n(); ++j) d[j] = values[pattern.col_ptr[j]];
        return d;
    }
};

/// General sparse matrix in compressed-row form, used for observation
/// projections. rows = observations, cols = latent dimension.
struct ProjectionMatrix {
    index rows = 0;
    index cols = 0;
    std::vector<index> row_ptr;  // size rows+1
    std::vector<index> col_idx;  // sorted within a row, no duplicates
    std::vector<double> values;

    index nnz() const { return row_ptr.empty() ? 0 : row_ptr.back(); }
};

struct Triplet {
    index row;
    index col;
    double value;
};

namespace detail {

/// Shared triplet compression: sort by (col, row), sum duplicates.
inline void compress_triplets(std::vector<Triplet>& t) {
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
        return std::tie(a.col, a.row) < std::tie(b.col, b.row);
    });
    std::size_t out = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (out > 0 && t[out - 1].row == t[k].row && t[out - 1].col == t[k].col) {
            t[out - 1].value += t[k].value;
        } else {
            t[out++] = t[k];
        }
    }
    t.resize(out);
}

}  // namespace detail

/// Build a symmetric matrix from triplets of either triangle. Entries given
/// twice (once per triangle) must agree; duplicates within a triangle are
/// summed. Missing diagonal positions are stored as structural zeros so the
/// pattern invariant holds.
inline SymmetricSparseMatrix symmetric_from_triplets(index n, std::vector<Triplet> triplets) {
    for (auto& t : triplets) {
        if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
            throw std::invalid_argument("triplet index out of range");
        if (t.row < t.col) std::swap(t.row, t.col);
    }
    for (index j = 0; j < n; ++j) triplets.push_back({j, j, 0.0});
    detail::compress_triplets(triplets);

    SymmetricSparseMatrix m;
    m.pattern.n = n;
    m.pattern.col_ptr.assign(n + 1, 0);
    m.pattern.row_idx.reserve(triplets.size());
    m.values.reserve(triplets.size());
    for (const auto& t : triplets) {
        ++m.pattern.col_ptr[t.col + 1];
        m.pattern.row_idx.push_back(t.row);
        m.values.push_back(t.value);
    }
    std::partial_sum(m.pattern.col_ptr.begin(), m.pattern.col_ptr.end(), m.pattern.col_ptr.begin());
    return m;
}

inline ProjectionMatrix projection_from_triplets(index rows, index cols, std::vector<Triplet> triplets) {
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw std::invalid_argument("triplet index out of range");
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    for (std::size_t k = 1; k < triplets.size(); ++k)
        if (triplets[k - 1].row == triplets[k].row && triplets[k - 1].col == triplets[k].col)
            throw std::invalid_argument("projection matrix has duplicate (row, col) entry");

    ProjectionMatrix a;
    a.rows = rows;
    a.cols = cols;
    a.row_ptr.assign(rows + 1, 0);
    a.col_idx.reserve(triplets.size());
    a.values.reserve(triplets.size());
    for (const auto& t : triplets) {
        ++a.row_ptr[t.row + 1];
        a.col_idx.push_back(t.col);
        a.values.push_back(t.value);
    }
    std::partial_sum(a.row_ptr.begin(), a.row_ptr.end(), a.row_ptr.begin());
    return a;
}

inline SymmetricSparseMatrix identity_matrix(index n) {
    SymmetricSparseMatrix m;
    m.pattern.n = n;
    m.pattern.col_ptr.resize(n + 1);
    std::iota(m.pattern.col_ptr.begin(), m.pattern.col_ptr.end(), index{0});
    m.pattern.row_idx.resize(n);
    std::iota(m.pattern.row_idx.begin(), m.pattern.row_idx.end(), index{0});
    m.values.assign(n, 1.0);
    return m;
}

inline SymmetricSparseMatrix diagonal_matrix(const DenseVector& d) {
    SymmetricSparseMatrix m = identity_matrix(static_cast<index>(d.size()));
    m.values.assign(d.begin(), d.end());
    return m;
}

inline SymmetricSparseMatrix scale(SymmetricSparseMatrix q, double alpha) {
    for (auto& v : q.values) v *= alpha;
    return q;
}

/// alpha*a + beta*b on the union pattern. Entries that cancel numerically
/// stay in the pattern; the structure never shrinks between calls.
inline SymmetricSparseMatrix add_scaled(const SymmetricSparseMatrix& a, const SymmetricSparseMatrix& b,
                                        double alpha, double beta) {
    if (a.n() != b.n()) throw DimensionMismatch("add_scaled: dimension mismatch");
    const index n = a.n();

    SymmetricSparseMatrix r;
    r.pattern.n = n;
    r.pattern.col_ptr.assign(n + 1, 0);
    r.pattern.row_idx.reserve(std::max(a.nnz(), b.nnz()));
    r.values.reserve(std::max(a.nnz(), b.nnz()));

    for (index j = 0; j < n; ++j) {
        index pa = a.pattern.col_ptr[j], ea = a.pattern.col_ptr[j + 1];
        index pb = b.pattern.col_ptr[j], eb = b.pattern.col_ptr[j + 1];
        while (pa < ea || pb < eb) {
            index ra = pa < ea ? a.pattern.row_idx[pa] : n;
            index rb = pb < eb ? b.pattern.row_idx[pb] : n;
            if (ra < rb) {
                r.pattern.row_idx.push_back(ra);
                r.values.push_back(alpha * a.values[pa++]);
            } else if (rb < ra) {
                r.pattern.row_idx.push_back(rb);
                r.values.push_back(beta * b.values[pb++]);
            } else {
                r.pattern.row_idx.push_back(ra);
                r.values.push_back(alpha * a.values[pa++] + beta * b.values[pb++]);
            }
        }
        r.pattern.col_ptr[j + 1] = static_cast<index>(r.pattern.row_idx.size());
    }
    return r;
}

namespace detail {

/// Full (both triangles) compressed-column expansion of a symmetric matrix.
/// Internal building block for products and Kronecker assembly.
struct FullCsc {
    index n = 0;
    std::vector<index> col_ptr;
    std::vector<index> row_idx;
    std::vector<double> values;
};

inline FullCsc expand_full(const SymmetricSparseMatrix& m) {
    const index n = m.n();
    FullCsc f;
    f.n = n;
    f.col_ptr.assign(n + 1, 0);
    for (index j = 0; j < n; ++j) {
        for (index p = m.pattern.col_ptr[j]; p < m.pattern.col_ptr[j + 1]; ++p) {
            index i = m.pattern.row_idx[p];
            ++f.col_ptr[j + 1];
            if (i != j) ++f.col_ptr[i + 1];
        }
    }
    std::partial_sum(f.col_ptr.begin(), f.col_ptr.end(), f.col_ptr.begin());
    f.row_idx.resize(f.col_ptr.back());
    f.values.resize(f.col_ptr.back());
    std::vector<index> next(f.col_ptr.begin(), f.col_ptr.end() - 1);
    // Two passes in row-sorted source order keep each output column sorted:
    // upper entries (i, j) with i < j come from columns i < j scanned first.
    for (index j = 0; j < n; ++j) {
        for (index p = m.pattern.col_ptr[j]; p < m.pattern.col_ptr[j + 1]; ++p) {
            index i = m.pattern.row_idx[p];
            if (i == j) continue;
            f.row_idx[next[i]] = j;
            f.values[next[i]++] = m.values[p];
        }
    }
    for (index j = 0; j < n; ++j) {
        for (index p = m.pattern.col_ptr[j]; p < m.pattern.col_ptr[j + 1]; ++p) {
            index i = m.pattern.row_idx[p];
            f.row_idx[next[j]] = i;
            f.values[next[j]++] = m.values[p];
        }
    }
    return f;
}

/// c = a * b with sorted output columns. Gather/scatter per column.
inline FullCsc multiply(const FullCsc& a, const FullCsc& b) {
    if (a.n != b.n) throw DimensionMismatch("multiply: dimension mismatch");
    const index n = a.n;
    FullCsc c;
    c.n = n;
    c.col_ptr.assign(n + 1, 0);
    std::vector<double> work(n, 0.0);
    std::vector<index> mark(n, -1);
    std::vector<index> rows;
    for (index j = 0; j < n; ++j) {
        rows.clear();
        for (index pb = b.col_ptr[j]; pb < b.col_ptr[j + 1]; ++pb) {
            index k = b.row_idx[pb];
            double bv = b.values[pb];
            for (index pa = a.col_ptr[k]; pa < a.col_ptr[k + 1]; ++pa) {
                index i = a.row_idx[pa];
                if (mark[i] != j) {
                    mark[i] = j;
                    work[i] = 0.0;
                    rows.push_back(i);
                }
                work[i] += a.values[pa] * bv;
            }
        }
        std::sort(rows.begin(), rows.end());
        for (index i : rows) {
            c.row_idx.push_back(i);
            c.values.push_back(work[i]);
        }
        c.col_ptr[j + 1] = static_cast<index>(c.row_idx.size());
    }
    return c;
}

/// Keep the lower triangle, force the diagonal present.
inline SymmetricSparseMatrix lower_from_full(const FullCsc& f) {
    SymmetricSparseMatrix m;
    m.pattern.n = f.n;
    m.pattern.col_ptr.assign(f.n + 1, 0);
    for (index j = 0; j < f.n; ++j) {
        index p = f.col_ptr[j];
        while (p < f.col_ptr[j + 1] && f.row_idx[p] < j) ++p;
        if (p == f.col_ptr[j + 1] || f.row_idx[p] != j) {
            m.pattern.row_idx.push_back(j);
            m.values.push_back(0.0);
        }
        for (; p < f.col_ptr[j + 1]; ++p) {
            m.pattern.row_idx.push_back(f.row_idx[p]);
            m.values.push_back(f.values[p]);
        }
        m.pattern.col_ptr[j + 1] = static_cast<index>(m.pattern.row_idx.size());
    }
    return m;
}

}  // namespace detail

/// Kronecker product with row-major block convention:
/// entry (i*m + k, j*m + l) = a(i, j) * b(k, l), m = b.n.
inline SymmetricSparseMatrix kron(const SymmetricSparseMatrix& a, const SymmetricSparseMatrix& b) {
    const index m = b.n();
    if (a.n() != 0 && m > std::numeric_limits<index>::max() / a.n())
        throw std::overflow_error("kron: result dimension overflows the index type");

    detail::FullCsc fa = detail::expand_full(a);
    detail::FullCsc fb = detail::expand_full(b);

    SymmetricSparseMatrix r;
    r.pattern.n = a.n() * m;
    r.pattern.col_ptr.assign(r.pattern.n + 1, 0);
    for (index ja = 0; ja < a.n(); ++ja) {
        for (index jb = 0; jb < m; ++jb) {
            const index col = ja * m + jb;
            bool has_diag = false;
            for (index pa = fa.col_ptr[ja]; pa < fa.col_ptr[ja + 1]; ++pa) {
                index ia = fa.row_idx[pa];
                if (ia < ja) continue;
                for (index pb = fb.col_ptr[jb]; pb < fb.col_ptr[jb + 1]; ++pb) {
                    index row = ia * m + fb.row_idx[pb];
                    if (row < col) continue;
                    if (row == col) has_diag = true;
                    r.pattern.row_idx.push_back(row);
                    r.values.push_back(fa.values[pa] * fb.values[pb]);
                }
            }
            if (!has_diag) {
                // a zero a(j,j) block still needs its structural diagonal
                r.pattern.row_idx.insert(r.pattern.row_idx.begin() + r.pattern.col_ptr[col], col);
                r.values.insert(r.values.begin() + r.pattern.col_ptr[col], 0.0);
            }
            r.pattern.col_ptr[col + 1] = static_cast<index>(r.pattern.row_idx.size());
        }
    }
    return r;
}

/// w * A' * A as a symmetric sparse matrix.
inline SymmetricSparseMatrix normal_product(const ProjectionMatrix& a, double w) {
    if (w <= 0.0) throw std::invalid_argument("normal_product: weight must be positive");
    std::vector<Triplet> trips;
    for (index r = 0; r < a.rows; ++r) {
        for (index p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
            for (index q = a.row_ptr[r]; q <= p; ++q) {
                trips.push_back({a.col_idx[p], a.col_idx[q], w * a.values[p] * a.values[q]});
            }
        }
    }
    return symmetric_from_triplets(a.cols, std::move(trips));
}

/// y = Q x, expanding the stored lower triangle to the full matrix.
inline DenseVector matvec(const SymmetricSparseMatrix& q, const DenseVector& x) {
    if (static_cast<index>(x.size()) != q.n()) throw DimensionMismatch("matvec: dimension mismatch");
    DenseVector y(x.size(), 0.0);
    for (index j = 0; j < q.n(); ++j) {
        for (index p = q.pattern.col_ptr[j]; p < q.pattern.col_ptr[j + 1]; ++p) {
            index i = q.pattern.row_idx[p];
            double v = q.values[p];
            y[i] += v * x[j];
            if (i != j) y[j] += v * x[i];
        }
    }
    return y;
}

inline DenseVector matvec(const ProjectionMatrix& a, const DenseVector& x) {
    if (static_cast<index>(x.size()) != a.cols) throw DimensionMismatch("matvec: dimension mismatch");
    DenseVector y(a.rows, 0.0);
    for (index r = 0; r < a.rows; ++r) {
        double s = 0.0;
        for (index p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) s += a.values[p] * x[a.col_idx[p]];
        y[r] = s;
    }
    return y;
}

/// y = A' x.
inline DenseVector matvec_transpose(const ProjectionMatrix& a, const DenseVector& x) {
    if (static_cast<index>(x.size()) != a.rows) throw DimensionMismatch("matvec_transpose: dimension mismatch");
    DenseVector y(a.cols, 0.0);
    for (index r = 0; r < a.rows; ++r)
        for (index p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) y[a.col_idx[p]] += a.values[p] * x[r];
    return y;
}

}  // namespace gmrf
