#pragma once

// Bayesian posterior of P given the report tallies: unnormalized
// log-density, Monte Carlo normalization, and the exact Dirichlet-mixture
// representation.
//
// The mixture groups the a^n secret vectors by their input tally t, which
// shrinks the component count to the number of feasible tallies; the
// combinatorial weight of a tally accumulates the per-output margin
// counts.  All weights are handled in log space.

#include <optional>

#include "ldp/estimate.hpp"
#include "ldp/metrics_finite.hpp"
#include "ldp/prior.hpp"
#include "ldp/protocol.hpp"

namespace ldp {

struct PosteriorDensity {
    Protocol protocol;
    DirichletPrior prior;
    std::vector<int> tallies;  // s_y, length b
    std::optional<MetricEstimate> normalizer;  // C = P(Yvec = yvec) = E_prior[prod (Qp)^{s_y}]

    /// log f(p) + sum_y s_y log (Qp)_y with f the prior density.
    double log_unnormalized(const SimplexPoint& p) const;
};

struct DirichletMixture {
    struct Component {
        double weight;                    // normalized
        std::vector<double> alpha;        // strictly positive parameters
    };
    std::vector<Component> components;
    MetricEstimate normalizer;            // total weight before normalization = P(Yvec = yvec)

    /// Density at a simplex point.
    double density(const SimplexPoint& p) const;
    /// Marginal of coordinate x is a mixture of Beta(alpha_x, alpha0 - alpha_x).
    double marginal_cdf(int x, double value) const;
    /// Exact per-coordinate means and variances.
    void moments(std::vector<double>& mean, std::vector<double>& variance) const;
};

PosteriorDensity posterior_unnormalized(const Protocol& q, const DirichletPrior& prior,
                                        std::vector<int> tallies);

/// Monte Carlo normalizer C with standard error; log-sum-exp internally.
MetricEstimate normalize_mc(const PosteriorDensity& density, const McConfig& cfg);

/// Exact Dirichlet-mixture posterior from the report tallies.
DirichletMixture posterior_dirichlet_mixture(const Protocol& q, const DirichletPrior& prior,
                                             const std::vector<int>& tallies,
                                             const EnumerationBudget& budget = {});

/// GRR under the Jeffreys prior: density prod_x p_x^{-1/2} (1+beta p_x)^{s_x}
/// with the exact k-lattice normalizer.
PosteriorDensity grr_posterior(int a, double epsilon, const std::vector<int>& tallies,
                               const EnumerationBudget& budget = {});

struct PosteriorMoments {
    std::vector<double> mean;
    std::vector<double> variance;
    Method method = Method::exact;
    std::size_t sample_count = 0;
    double effective_sample_size = 0.0;  // Monte Carlo path only
};

/// Exact moments via the mixture.
PosteriorMoments posterior_moments(const DirichletMixture& mixture);
/// Self-normalized importance sampling moments from prior draws; throws
/// EffectiveSampleSizeTooLow when the weights degenerate (< 100).
PosteriorMoments posterior_moments(const PosteriorDensity& density, const McConfig& cfg);

}  // namespace ldp
