#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmrf {

using index = std::int64_t;

using DenseVector = std::vector<double>;

/// Column-major dense matrix. Used for multi-column right-hand sides and
/// sample blocks, never for anything large.
struct DenseMatrix {
    index rows = 0;
    index cols = 0;
    std::vector<double> data;  // column-major, rows*cols

    DenseMatrix() = default;
    DenseMatrix(index r, index c) : rows(r), cols(c), data(static_cast<std::size_t>(r * c), 0.0) {}

    double& operator()(index i, index j) { return data[static_cast<std::size_t>(j * rows + i)]; }
    double operator()(index i, index j) const { return data[static_cast<std::size_t>(j * rows + i)]; }

    double* col(index j) { return data.data() + j * rows; }
    const double* col(index j) const { return data.data() + j * rows; }
};

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct NotPositiveDefinite : std::runtime_error {
    index column;
    explicit NotPositiveDefinite(index col)
        : std::runtime_error("matrix is not positive definite at column " + std::to_string(col)),
          column(col) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gmrf
