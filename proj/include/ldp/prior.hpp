#pragma once

// Dirichlet priors over the input simplex, the Jeffreys prior, sampling,
// and the prior-derived constants.
//
// The differential entropy is the delta-function surface integral
// evaluated in the (a-1)-coordinate Lebesgue parametrization.  The
// Jacobian of the parametrization (sqrt(a) from the surface measure)
// cancels exactly against the 1/sqrt(a) from the delta normalization,
// so the standard Dirichlet entropy formula applies verbatim:
//   h(P) = log B(alpha) + (alpha0 - a) psi(alpha0) - sum_x (alpha_x - 1) psi(alpha_x).

#include <cstdint>
#include <span>
#include <vector>

#include "ldp/estimate.hpp"
#include "ldp/protocol.hpp"
#include "ldp/rng.hpp"

namespace ldp {

struct DirichletPrior {
    std::vector<double> alpha;

    int size() const { return static_cast<int>(alpha.size()); }
    bool is_jeffreys() const {
        for (double a : alpha)
            if (a != 0.5) return false;
        return true;
    }
    static DirichletPrior checked(std::vector<double> alpha);
};

/// Jeffreys prior Dirichlet(1/2, ..., 1/2) on a >= 2 symbols.
DirichletPrior jeffreys(int a);

/// Monte Carlo configuration.  Blocks of `batch_size` samples are seeded
/// independently from (seed, block index), so estimates are bitwise
/// reproducible for any worker count.
struct McConfig {
    std::size_t samples = 200'000;
    std::uint64_t seed = 0;
    std::size_t batch_size = 4096;
    int workers = 1;
};

/// Stream of i.i.d. Dirichlet draws (normalized independent gammas).
class DirichletSampler {
  public:
    DirichletSampler(DirichletPrior prior, std::uint64_t seed)
        : prior_(std::move(prior)), rng_(seed) {}
    SimplexPoint next() {
        SimplexPoint p;
        p.p.resize(prior_.size());
        rng_.next_dirichlet(prior_.alpha, p.p);
        return p;
    }

  private:
    DirichletPrior prior_;
    Xoshiro256pp rng_;
};

/// Differential entropy h(P) of the prior (exact digamma formula).
double prior_differential_entropy(const DirichletPrior& prior);

/// C_mu = U^as(identity) = -log(2 pi e)/2 - E[sum_x log P_x]/(2a-2).
/// Exact under the Jeffreys prior, Monte Carlo otherwise.
MetricEstimate c_mu(const DirichletPrior& prior, const McConfig& cfg = {});

/// Per-user secret entropy H(X_i|P) = E[-sum_x P_x log P_x].
/// Exact under the Jeffreys prior, Monte Carlo otherwise.
MetricEstimate baseline_secret_entropy(const DirichletPrior& prior, const McConfig& cfg = {});

}  // namespace ldp
