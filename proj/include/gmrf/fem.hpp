#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <sstream>

#include "gmrf/sparse.hpp"

namespace gmrf {

struct Mesh1D {
    std::vector<double> nodes;  // strictly increasing

    index n() const { return static_cast<index>(nodes.size()); }

    void validate() const {
        if (nodes.size() < 2) throw std::invalid_argument("1d mesh needs at least two nodes");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1]))
                throw std::invalid_argument("1d mesh coordinates must be strictly increasing");
    }

    static Mesh1D regular(index count, double start = 1.0, double step = 1.0) {
        Mesh1D m;
        m.nodes.resize(count);
        for (index i = 0; i < count; ++i) m.nodes[i] = start + step * static_cast<double>(i);
        return m;
    }
};

struct TriMesh2D {
    std::vector<double> x, y;
    std::vector<std::array<index, 3>> triangles;

    index n() const { return static_cast<index>(x.size()); }

    void validate() const {
        if (x.size() != y.size()) throw std::invalid_argument("2d mesh: coordinate arrays differ in length");
        for (const auto& t : triangles)
            for (index v : t)
                if (v < 0 || v >= n()) throw std::invalid_argument("2d mesh: triangle index out of range");
    }
};

/// Mass/stiffness family for a mesh: lumped mass c0 (diagonal) and
/// g[0] = g1, g[1] = g2, ... with g_m = g_{m-1} c0^-1 g1.
struct FemMatrices {
    SymmetricSparseMatrix c0;
    std::vector<SymmetricSparseMatrix> g;

    index n() const { return c0.n(); }
    const SymmetricSparseMatrix& gm(index m) const { return g.at(m - 1); }
};

/// Boundary mass correction for the temporal operator: 0.5 at the first and
/// last node, nothing else.
struct TemporalBoundary {
    SymmetricSparseMatrix m1;

    static TemporalBoundary for_nodes(index n) {
        if (n < 2) throw std::invalid_argument("temporal boundary needs at least two nodes");
        TemporalBoundary b;
        b.m1 = symmetric_from_triplets(n, {{0, 0, 0.5}, {n - 1, n - 1, 0.5}});
        return b;
    }
};

namespace detail {

/// Extend the family by the lumped-mass recursion up to g_{order-1}.
inline void extend_family(FemMatrices& f, index order) {
    if (order < 1) throw std::invalid_argument("fem: order must be at least 1");
    if (order == 1) {
        f.g.clear();
        return;
    }
    DenseVector invc0(f.c0.n());
    DenseVector c0d = f.c0.diagonal();
    for (index i = 0; i < f.c0.n(); ++i) {
        if (!(c0d[i] > 0.0)) throw std::invalid_argument("fem: lumped mass must be strictly positive");
        invc0[i] = 1.0 / c0d[i];
    }
    FullCsc g1_full = expand_full(f.g[0]);
    while (static_cast<index>(f.g.size()) < order - 1) {
        FullCsc prev = expand_full(f.g.back());
        for (index j = 0; j < prev.n; ++j)
            for (index p = prev.col_ptr[j]; p < prev.col_ptr[j + 1]; ++p) prev.values[p] *= invc0[j];
        f.g.push_back(lower_from_full(multiply(prev, g1_full)));
    }
}

}  // namespace detail

/// Piecewise-linear elements on an interval mesh: lumped (row-sum) mass and
/// the 1/h stiffness couplings.
inline FemMatrices fem_1d(const Mesh1D& mesh, index order) {
    mesh.validate();
    const index n = mesh.n();

    std::vector<Triplet> mass, stiff;
    for (index e = 0; e + 1 < n; ++e) {
        double h = mesh.nodes[e + 1] - mesh.nodes[e];
        mass.push_back({e, e, h / 2.0});
        mass.push_back({e + 1, e + 1, h / 2.0});
        stiff.push_back({e, e, 1.0 / h});
        stiff.push_back({e + 1, e + 1, 1.0 / h});
        stiff.push_back({e + 1, e, -1.0 / h});
    }
    FemMatrices f;
    f.c0 = symmetric_from_triplets(n, std::move(mass));
    if (order >= 2) f.g.push_back(symmetric_from_triplets(n, std::move(stiff)));
    detail::extend_family(f, order);
    return f;
}

/// Linear triangle elements: |T|/3 lumped mass per vertex, stiffness from
/// shape-function gradient inner products.
inline FemMatrices fem_2d(const TriMesh2D& mesh, index order) {
    mesh.validate();
    const index n = mesh.n();
    if (mesh.triangles.empty()) throw std::invalid_argument("fem: mesh has no triangles");

    double xmin = mesh.x[0], xmax = mesh.x[0], ymin = mesh.y[0], ymax = mesh.y[0];
    for (index v = 0; v < n; ++v) {
        xmin = std::min(xmin, mesh.x[v]);
        xmax = std::max(xmax, mesh.x[v]);
        ymin = std::min(ymin, mesh.y[v]);
        ymax = std::max(ymax, mesh.y[v]);
    }
    const double bbox = std::max(xmax - xmin, ymax - ymin);

    std::vector<Triplet> mass, stiff;
    for (const auto& t : mesh.triangles) {
        const double x0 = mesh.x[t[0]], y0 = mesh.y[t[0]];
        const double x1 = mesh.x[t[1]], y1 = mesh.y[t[1]];
        const double x2 = mesh.x[t[2]], y2 = mesh.y[t[2]];
        const double twice_area = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
        const double area = std::abs(twice_area) / 2.0;
        if (area < 1e-14 * bbox * bbox)
            throw std::invalid_argument("fem: degenerate triangle in mesh");

        // edge vectors opposite each vertex
        const double ex[3] = {x2 - x1, x0 - x2, x1 - x0};
        const double ey[3] = {y2 - y1, y0 - y2, y1 - y0};
        for (int a = 0; a < 3; ++a) {
            mass.push_back({t[a], t[a], area / 3.0});
            for (int b = 0; b <= a; ++b) {
                double k = (ex[a] * ex[b] + ey[a] * ey[b]) / (4.0 * area);
                stiff.push_back({t[a], t[b], k});
            }
        }
    }
    FemMatrices f;
    f.c0 = symmetric_from_triplets(n, std::move(mass));
    if (order >= 2) f.g.push_back(symmetric_from_triplets(n, std::move(stiff)));
    detail::extend_family(f, order);
    return f;
}

/// Regular grid triangulation: nx*ny vertices, every cell split along the
/// same diagonal.
inline TriMesh2D structured_mesh(double x0, double x1, double y0, double y1, index nx, index ny) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("structured mesh needs nx, ny >= 2");
    if (!(x1 > x0) || !(y1 > y0)) throw std::invalid_argument("structured mesh: empty range");

    TriMesh2D m;
    m.x.reserve(nx * ny);
    m.y.reserve(nx * ny);
    const double dx = (x1 - x0) / static_cast<double>(nx - 1);
    const double dy = (y1 - y0) / static_cast<double>(ny - 1);
    for (index j = 0; j < ny; ++j) {
        for (index i = 0; i < nx; ++i) {
            m.x.push_back(x0 + dx * static_cast<double>(i));
            m.y.push_back(y0 + dy * static_cast<double>(j));
        }
    }
    auto vid = [nx](index i, index j) { return j * nx + i; };
    for (index j = 0; j + 1 < ny; ++j) {
        for (index i = 0; i + 1 < nx; ++i) {
            m.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            m.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    return m;
}

// Mesh files: "V T" header, V coordinate lines, T index triples (0-based).
// A 1d mesh uses "V 0" and one coordinate per line.

struct MeshFile {
    std::optional<Mesh1D> line;
    std::optional<TriMesh2D> surface;
};

inline MeshFile read_mesh_file(std::istream& in) {
    index nv = -1, nt = -1;
    std::string l;
    if (!(in >> nv >> nt) || nv < 0 || nt < 0) throw ParseError("mesh: bad header line");
    std::getline(in, l);

    MeshFile mf;
    if (nt == 0) {
        Mesh1D m;
        m.nodes.resize(nv);
        for (index i = 0; i < nv; ++i)
            if (!(in >> m.nodes[i])) throw ParseError("mesh: bad 1d coordinate line");
        m.validate();
        mf.line = std::move(m);
        return mf;
    }
    TriMesh2D m;
    m.x.resize(nv);
    m.y.resize(nv);
    for (index i = 0; i < nv; ++i)
        if (!(in >> m.x[i] >> m.y[i])) throw ParseError("mesh: bad vertex line");
    m.triangles.resize(nt);
    for (index t = 0; t < nt; ++t)
        if (!(in >> m.triangles[t][0] >> m.triangles[t][1] >> m.triangles[t][2]))
            throw ParseError("mesh: bad triangle line");
    m.validate();
    mf.surface = std::move(m);
    return mf;
}

inline MeshFile read_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open: " + path);
    return read_mesh_file(in);
}

inline void write_mesh_file(std::ostream& out, const TriMesh2D& m) {
    out << m.n() << " " << m.triangles.size() << "\n";
    char buf[80];
    for (index v = 0; v < m.n(); ++v) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", m.x[v], m.y[v]);
        out << buf;
    }
    for (const auto& t : m.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
}

inline void write_mesh_file(std::ostream& out, const Mesh1D& m) {
    out << m.n() << " 0\n";
    char buf[40];
    for (double t : m.nodes) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", t);
        out << buf;
    }
}

template <typename Mesh>
inline void write_mesh_file(const std::string& path, const Mesh& m) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path);
    write_mesh_file(out, m);
}

}  // namespace gmrf
