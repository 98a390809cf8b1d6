#pragma once

#include <numbers>

#include "gmrf/fem.hpp"
#include "gmrf/selinv.hpp"

namespace gmrf {

/// Hyperparameters of the space-time models. Model orders are fixed:
/// first-order Markov in time, Matern alpha = 2 in space, alpha_eps = 1.
struct SpaceTimeHyper {
    double range_time = 20.0;
    double range_space = 6.0;
    double sigma_u = 1.0;
    double gt = 2.23;
    double gs2 = 8.0 / 36.0;
    double ge2 = 0.0805;
    double kappa_t = 0.1;

    static constexpr int alpha_t = 1;
    static constexpr int alpha_s = 2;
    static constexpr int alpha_eps = 1;

    static SpaceTimeHyper from_ranges(double range_time, double range_space, double sigma_u = 1.0,
                                      double gt = 2.23, double ge2 = 0.0805) {
        SpaceTimeHyper h;
        h.range_time = range_time;
        h.range_space = range_space;
        h.sigma_u = sigma_u;
        h.gt = gt;
        h.ge2 = ge2;
        h.kappa_t = 2.0 / range_time;
        h.gs2 = 8.0 / (range_space * range_space);
        h.validate();
        return h;
    }

    void validate() const {
        for (double v : {range_time, range_space, sigma_u, gt, gs2, ge2, kappa_t})
            if (!(v > 0.0)) throw std::invalid_argument("space-time hyperparameters must be positive");
    }
};

/// Stationary first-order temporal precision
/// Q_M = (kappa^2 M0 + 2 kappa M1 + M2) / (2 kappa),
/// with M0 the lumped mass, M2 the stiffness and M1 the boundary fix that
/// keeps the marginal variance flat out to the ends.
inline SymmetricSparseMatrix temporal_precision(const FemMatrices& tfem, const TemporalBoundary& m1,
                                                double kappa_t) {
    if (!(kappa_t > 0.0)) throw std::invalid_argument("temporal_precision: kappa must be positive");
    if (tfem.g.empty()) throw std::invalid_argument("temporal_precision: temporal family needs g1");
    if (m1.m1.n() != tfem.n()) throw DimensionMismatch("temporal_precision: boundary size mismatch");
    SymmetricSparseMatrix q = add_scaled(tfem.c0, m1.m1, kappa_t * kappa_t, 2.0 * kappa_t);
    q = add_scaled(q, tfem.gm(1), 1.0, 1.0);
    return scale(q, 1.0 / (2.0 * kappa_t));
}

/// Matern alpha = 2 spatial precision
/// Q_s = (gs2^2 C0 + 2 gs2 G1 + G2) / (4 pi gs2).
inline SymmetricSparseMatrix spatial_precision(const FemMatrices& sfem, double gs2) {
    if (!(gs2 > 0.0)) throw std::invalid_argument("spatial_precision: gs2 must be positive");
    if (sfem.g.size() < 2) throw std::invalid_argument("spatial_precision: g2 missing, assemble with order >= 3");
    SymmetricSparseMatrix q = add_scaled(sfem.c0, sfem.gm(1), gs2 * gs2, 2.0 * gs2);
    q = add_scaled(q, sfem.gm(2), 1.0, 1.0);
    return scale(q, 1.0 / (4.0 * std::numbers::pi * gs2));
}

/// Separable model: Kronecker product of the temporal and spatial
/// precisions. The space index varies fastest.
inline SymmetricSparseMatrix separable_precision(const SymmetricSparseMatrix& q_t,
                                                 const SymmetricSparseMatrix& q_s) {
    return kron(q_t, q_s);
}

/// Non-separable diffusion model, three Kronecker terms scaled by ge2:
///   gt^2 M2 (x) (gs2 C + G1)
/// + M0      (x) (gs2^3 C + gs2^2 G1 + gs2 G2 + G3)
/// + 2 gt M1 (x) (gs2^2 C + 2 gs2 G1 + G2)
inline SymmetricSparseMatrix nonseparable_precision(const FemMatrices& tfem, const TemporalBoundary& m1,
                                                    const FemMatrices& sfem, const SpaceTimeHyper& h) {
    h.validate();
    if (tfem.g.empty()) throw std::invalid_argument("nonseparable_precision: temporal family needs g1");
    if (sfem.g.size() < 3)
        throw std::invalid_argument("nonseparable_precision: g3 missing, assemble with order >= 4");
    if (m1.m1.n() != tfem.n()) throw DimensionMismatch("nonseparable_precision: boundary size mismatch");

    const double gs2 = h.gs2;
    SymmetricSparseMatrix s_react = add_scaled(sfem.c0, sfem.gm(1), gs2, 1.0);
    SymmetricSparseMatrix s_diff = add_scaled(sfem.c0, sfem.gm(1), gs2 * gs2 * gs2, gs2 * gs2);
    s_diff = add_scaled(s_diff, sfem.gm(2), 1.0, gs2);
    s_diff = add_scaled(s_diff, sfem.gm(3), 1.0, 1.0);
    SymmetricSparseMatrix s_bound = add_scaled(sfem.c0, sfem.gm(1), gs2 * gs2, 2.0 * gs2);
    s_bound = add_scaled(s_bound, sfem.gm(2), 1.0, 1.0);

    SymmetricSparseMatrix q = kron(scale(tfem.gm(1), h.gt * h.gt), s_react);
    q = add_scaled(q, kron(tfem.c0, s_diff), 1.0, 1.0);
    q = add_scaled(q, kron(scale(m1.m1, 2.0 * h.gt), s_bound), 1.0, 1.0);
    return scale(q, h.ge2);
}

/// Flattened space-time index with space varying fastest.
inline index st_index(index time, index space, index n_space) { return time * n_space + space; }

/// Nodes farther than `margin` from the bounding box of the mesh. Used to
/// exclude boundary-inflated variances from checks.
inline std::vector<index> interior_sites(const TriMesh2D& mesh, double margin) {
    double xmin = mesh.x[0], xmax = mesh.x[0], ymin = mesh.y[0], ymax = mesh.y[0];
    for (index v = 0; v < mesh.n(); ++v) {
        xmin = std::min(xmin, mesh.x[v]);
        xmax = std::max(xmax, mesh.x[v]);
        ymin = std::min(ymin, mesh.y[v]);
        ymax = std::max(ymax, mesh.y[v]);
    }
    std::vector<index> sites;
    for (index v = 0; v < mesh.n(); ++v) {
        double d = std::min(std::min(mesh.x[v] - xmin, xmax - mesh.x[v]),
                            std::min(mesh.y[v] - ymin, ymax - mesh.y[v]));
        if (d > margin) sites.push_back(v);
    }
    return sites;
}

/// Noise scaling that would give unit median variance over the given sites.
/// The precision is linear in ge2, so one selected inversion at the current
/// value determines the calibrated one exactly.
inline double ge2_for_unit_variance(const FemMatrices& tfem, const TemporalBoundary& m1,
                                    const FemMatrices& sfem, SpaceTimeHyper h,
                                    const std::vector<index>& spatial_sites, int cores = 1) {
    SymmetricSparseMatrix q = nonseparable_precision(tfem, m1, sfem, h);
    CholeskyFactor f = factorize(q, OrderingScheme::amd, cores);
    DenseVector v = marginal_variances(f, cores);
    const index n_s = sfem.n();
    const index n_t = tfem.n();
    std::vector<double> picked;
    for (index t = 0; t < n_t; ++t)
        for (index s : spatial_sites) picked.push_back(v[st_index(t, s, n_s)]);
    if (picked.empty()) throw std::invalid_argument("ge2 calibration: no interior sites");
    std::nth_element(picked.begin(), picked.begin() + picked.size() / 2, picked.end());
    double median = picked[picked.size() / 2];
    return h.ge2 * median;
}

}  // namespace gmrf
