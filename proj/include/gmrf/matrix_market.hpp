#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "gmrf/sparse.hpp"

namespace gmrf {

// Matrix Market coordinate files: symmetric matrices carry the lower
// triangle with 1-based indices, values printed with 17 significant digits
// so a write/read round trip is exact.

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string next_data_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        std::size_t k = line.find_first_not_of(" \t\r");
        if (k == std::string::npos) continue;
        if (line[k] == '%') continue;
        return line;
    }
    throw ParseError("matrix market: unexpected end of file");
}

}  // namespace detail

inline void write_matrix_market(std::ostream& out, const SymmetricSparseMatrix& m) {
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << m.n() << " " << m.n() << " " << m.nnz() << "\n";
    for (index j = 0; j < m.n(); ++j)
        for (index p = m.pattern.col_ptr[j]; p < m.pattern.col_ptr[j + 1]; ++p)
            out << (m.pattern.row_idx[p] + 1) << " " << (j + 1) << " "
                << detail::format_double(m.values[p]) << "\n";
}

inline void write_matrix_market(const std::string& path, const SymmetricSparseMatrix& m) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    write_matrix_market(out, m);
}

/// General (non-symmetric) coordinate output, used for projection matrices
/// and triangular factors.
inline void write_matrix_market_general(std::ostream& out, index rows, index cols,
                                        const std::vector<Triplet>& entries) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << rows << " " << cols << " " << entries.size() << "\n";
    for (const auto& t : entries)
        out << (t.row + 1) << " " << (t.col + 1) << " " << detail::format_double(t.value) << "\n";
}

struct MatrixMarketHeader {
    bool symmetric = false;
    index rows = 0;
    index cols = 0;
    index entries = 0;
};

inline MatrixMarketHeader read_matrix_market_header(std::istream& in) {
    std::string banner;
    if (!std::getline(in, banner)) throw ParseError("matrix market: empty file");
    std::istringstream bs(banner);
    std::string tag, object, format, field, symmetry;
    bs >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%MatrixMarket" || object != "matrix" || format != "coordinate" || field != "real")
        throw ParseError("matrix market: unsupported header: " + banner);
    if (symmetry != "symmetric" && symmetry != "general")
        throw ParseError("matrix market: unsupported symmetry: " + symmetry);

    MatrixMarketHeader h;
    h.symmetric = (symmetry == "symmetric");
    std::istringstream sizes(detail::next_data_line(in));
    if (!(sizes >> h.rows >> h.cols >> h.entries) || h.rows < 0 || h.cols < 0 || h.entries < 0)
        throw ParseError("matrix market: bad size line");
    return h;
}

inline SymmetricSparseMatrix read_matrix_market(std::istream& in) {
    MatrixMarketHeader h = read_matrix_market_header(in);
    if (!h.symmetric) throw ParseError("matrix market: expected a symmetric matrix");
    if (h.rows != h.cols) throw ParseError("matrix market: symmetric matrix must be square");

    std::vector<Triplet> trips;
    trips.reserve(h.entries);
    for (index k = 0; k < h.entries; ++k) {
        std::istringstream ls(detail::next_data_line(in));
        index i, j;
        double v;
        if (!(ls >> i >> j >> v)) throw ParseError("matrix market: bad entry line");
        if (i < j) throw ParseError("matrix market: symmetric input must store the lower triangle");
        trips.push_back({i - 1, j - 1, v});
    }
    SymmetricSparseMatrix m = symmetric_from_triplets(h.rows, std::move(trips));
    m.pattern.validate();
    return m;
}

inline SymmetricSparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open: " + path);
    return read_matrix_market(in);
}

inline ProjectionMatrix read_matrix_market_general(std::istream& in) {
    MatrixMarketHeader h = read_matrix_market_header(in);
    std::vector<Triplet> trips;
    trips.reserve(h.entries);
    for (index k = 0; k < h.entries; ++k) {
        std::istringstream ls(detail::next_data_line(in));
        index i, j;
        double v;
        if (!(ls >> i >> j >> v)) throw ParseError("matrix market: bad entry line");
        trips.push_back({i - 1, j - 1, v});
        if (h.symmetric && i != j) trips.push_back({j - 1, i - 1, v});
    }
    return projection_from_triplets(h.rows, h.cols, std::move(trips));
}

inline ProjectionMatrix read_matrix_market_general(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open: " + path);
    return read_matrix_market_general(in);
}

/// Plain vector files: one value per line. "NA" (any case) marks a missing
/// observation and reads as NaN.
inline DenseVector read_vector(std::istream& in, bool allow_missing = false) {
    DenseVector v;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t k = line.find_first_not_of(" \t\r");
        if (k == std::string::npos) continue;
        if (line[k] == '%' || line[k] == '#') continue;
        std::string tok = line.substr(k);
        while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.pop_back();
        if (allow_missing && (tok == "NA" || tok == "na" || tok == "NaN" || tok == "nan")) {
            v.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        try {
            std::size_t used = 0;
            double x = std::stod(tok, &used);
            if (used != tok.size()) throw ParseError("vector: trailing characters in line: " + line);
            v.push_back(x);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("vector: cannot parse line: " + line);
        }
    }
    return v;
}

inline DenseVector read_vector(const std::string& path, bool allow_missing = false) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open: " + path);
    return read_vector(in, allow_missing);
}

inline void write_vector(std::ostream& out, const DenseVector& v) {
    for (double x : v) out << detail::format_double(x) << "\n";
}

inline void write_vector(const std::string& path, const DenseVector& v) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    write_vector(out, v);
}

}  // namespace gmrf
