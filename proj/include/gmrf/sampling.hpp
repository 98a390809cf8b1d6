#pragma once

#include "gmrf/cholesky.hpp"
#include "gmrf/rng.hpp"
#include "gmrf/selinv.hpp"

namespace gmrf {

struct SampleConfig {
    std::uint64_t seed = 0;
    index n_samples = 1;
    OrderingScheme reordering = OrderingScheme::amd;
};

/// Gaussian observations y = A x + e, e ~ N(0, sigma_eps^2 I). Missing
/// values are handled by row deletion before construction, so `y` here is
/// the compacted observation vector with one entry per row of A.
struct ObservationModel {
    ProjectionMatrix a;
    double sigma_eps = 1.0;
    DenseVector y;
};

/// Drop rows of A paired with missing (NaN) observations. The posterior is
/// identical to the infinite-noise treatment and numerically safer.
inline ObservationModel make_observation_model(const ProjectionMatrix& a_full, const DenseVector& y_full,
                                               double sigma_eps) {
    if (sigma_eps <= 0.0) throw std::invalid_argument("observation model: sigma_eps must be positive");
    if (static_cast<index>(y_full.size()) != a_full.rows)
        throw DimensionMismatch("observation model: y length must match A row count");

    ObservationModel m;
    m.sigma_eps = sigma_eps;
    std::vector<Triplet> trips;
    index out_row = 0;
    for (index r = 0; r < a_full.rows; ++r) {
        if (std::isnan(y_full[r])) continue;
        for (index p = a_full.row_ptr[r]; p < a_full.row_ptr[r + 1]; ++p)
            trips.push_back({out_row, a_full.col_idx[p], a_full.values[p]});
        m.y.push_back(y_full[r]);
        ++out_row;
    }
    m.a = projection_from_triplets(out_row, a_full.cols, std::move(trips));
    return m;
}

/// Selection matrix observing the given latent sites directly.
inline ProjectionMatrix observe_sites(index latent_n, const std::vector<index>& sites) {
    std::vector<Triplet> trips;
    trips.reserve(sites.size());
    for (index r = 0; r < static_cast<index>(sites.size()); ++r) trips.push_back({r, sites[r], 1.0});
    return projection_from_triplets(static_cast<index>(sites.size()), latent_n, std::move(trips));
}

/// Draws from N(0, Q^-1) given a ready factor. Column c uses RNG stream c,
/// so the draw set is independent of evaluation order and worker count.
inline DenseMatrix sample_from_factor(const CholeskyFactor& f, std::uint64_t seed, index n_samples,
                                      int cores = 1) {
    if (n_samples < 1) throw std::invalid_argument("sample: n_samples must be at least 1");
    const SymbolicFactor& s = *f.symbolic;
    const index n = s.n;
    DenseMatrix out(n, n_samples);
    detail::run_tasks(n_samples, cores, [&](index c, int) {
        DenseVector z(n);
        for (index i = 0; i < n; ++i) z[i] = rng::standard_normal(seed, static_cast<std::uint64_t>(c), i);
        DenseVector v = solve_upper(f, std::move(z));
        double* col = out.col(c);
        for (index k = 0; k < n; ++k) col[s.p.perm[k]] = v[k];
    });
    return out;
}

/// Seeded draws from N(0, Q^-1): x = P' solve(L', z). With the identity
/// reordering the same z stream maps onto equally sized models the same
/// way, which is what makes side-by-side simulations comparable.
inline DenseMatrix sample(const SymmetricSparseMatrix& q, const SampleConfig& cfg, int cores = 1) {
    CholeskyFactor f = factorize(q, cfg.reordering, cores);
    return sample_from_factor(f, cfg.seed, cfg.n_samples, cores);
}

/// Q_post = Q_prior + sigma_eps^-2 A'A on the union pattern.
inline SymmetricSparseMatrix posterior_precision(const SymmetricSparseMatrix& q_prior,
                                                 const ObservationModel& obs) {
    if (obs.a.cols != q_prior.n())
        throw DimensionMismatch("posterior_precision: A column count must match the latent dimension");
    if (obs.sigma_eps <= 0.0) throw std::invalid_argument("posterior_precision: sigma_eps must be positive");
    double w = 1.0 / (obs.sigma_eps * obs.sigma_eps);
    return add_scaled(q_prior, normal_product(obs.a, w), 1.0, 1.0);
}

/// mu = Q_post^-1 (sigma_eps^-2 A' y), with the prior centered at zero.
inline DenseVector posterior_mean(const SymmetricSparseMatrix& q_prior, const ObservationModel& obs,
                                  int cores = 1, OrderingScheme scheme = OrderingScheme::amd) {
    SymmetricSparseMatrix qp = posterior_precision(q_prior, obs);
    if (static_cast<index>(obs.y.size()) != obs.a.rows)
        throw DimensionMismatch("posterior_mean: y length must match A row count");
    DenseVector b = matvec_transpose(obs.a, obs.y);
    double w = 1.0 / (obs.sigma_eps * obs.sigma_eps);
    for (double& v : b) v *= w;
    CholeskyFactor f = factorize(qp, scheme, cores);
    return solve_full(f, b);
}

/// Posterior draw: zero-mean sample from the posterior precision plus the
/// posterior mean, column by column.
inline DenseMatrix posterior_sample(const SymmetricSparseMatrix& q_prior, const ObservationModel& obs,
                                    const SampleConfig& cfg, int cores = 1) {
    SymmetricSparseMatrix qp = posterior_precision(q_prior, obs);
    if (static_cast<index>(obs.y.size()) != obs.a.rows)
        throw DimensionMismatch("posterior_sample: y length must match A row count");
    CholeskyFactor f = factorize(qp, cfg.reordering, cores);

    DenseVector b = matvec_transpose(obs.a, obs.y);
    double w = 1.0 / (obs.sigma_eps * obs.sigma_eps);
    for (double& v : b) v *= w;
    DenseVector mu = solve_full(f, b);

    DenseMatrix draws = sample_from_factor(f, cfg.seed, cfg.n_samples, cores);
    for (index c = 0; c < draws.cols; ++c) {
        double* col = draws.col(c);
        for (index i = 0; i < draws.rows; ++i) col[i] += mu[i];
    }
    return draws;
}

}  // namespace gmrf
