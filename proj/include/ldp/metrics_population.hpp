#pragma once

// n-independent and asymptotic metrics: average privacy, asymptotic
// utility, effective participation, tradeoff bounds and limit predictions.
//
// Inner sums over the alphabets are exact; only the prior expectation is
// sampled.  Average privacy is computed at n = 1, which is valid at every
// n because the ratio H(X|Y,P)/H(X|P) does not depend on n.

#include <optional>

#include "ldp/estimate.hpp"
#include "ldp/prior.hpp"
#include "ldp/protocol.hpp"

namespace ldp {

struct RejectionPolicy {
    double pushforward_floor = 1e-300;  // samples with any (Qp)_y below this are rejected
    double max_rejected_fraction = 1e-3;
};

/// S_mu = 1 - (H(Y|P) - H(Y|X,P)) / H(X|P), expectations over the prior.
/// Throws DegeneratePrior when the estimated H(X|P) is below 1e-9.
MetricEstimate avg_privacy(const Protocol& q, const DirichletPrior& prior, const McConfig& cfg);

/// U^as = -log(2 pi e)/2 + E[log det(Q^T D_P Q)]/(2a-2), D_p = diag(1/(Qp)_y).
/// Requires a faithful protocol (NotFaithful otherwise); rejects samples per
/// the policy and fails with TooManyRejections past the budget.
MetricEstimate asymptotic_utility(const Protocol& q, const DirichletPrior& prior,
                                  const McConfig& cfg, const RejectionPolicy& policy = {});

/// F_mu = e^{2 U^as - 2 C_mu} for faithful protocols, exactly 0 otherwise.
/// The difference U^as - C_mu is estimated in a single pass over common
/// samples, which removes the shared prior noise.
MetricEstimate effective_participation(const Protocol& q, const DirichletPrior& prior,
                                       const McConfig& cfg, const RejectionPolicy& policy = {});

/// Upper bounds from the tradeoff theorem, in terms of S^wc = e^{-LDP}:
///   bound on U^as:  -log(2 pi e)/2 + log((1 - S^wc)/S^wc)
///   bound on F_mu:  e^{-2 C_mu}/(2 pi e) * ((1 - S^wc)/S^wc)^2
/// Throws DegenerateWorstCase when S^wc is 0 or 1.
struct TradeoffBounds {
    MetricEstimate utility_bound;
    MetricEstimate participation_bound;
};
TradeoffBounds tradeoff_bounds(const Protocol& q, const DirichletPrior& prior, const McConfig& cfg);

/// Large-n predictions from the limit theorems.
struct LimitPrediction {
    double u_distr_limit = 0.0;              // (d-1)/(a-1)
    double u_tally_limit = 0.0;              // (d+b'-2)/(2a-2)
    double digit_slope = 0.5;                // faithful protocols only
    std::optional<MetricEstimate> digit_intercept;          // U^as
    std::optional<MetricEstimate> one_minus_udistr_scale;   // 2 (C_mu - U^as)
    std::optional<MetricEstimate> r_mu;                     // (a-1) U^as + h(P)
};
LimitPrediction limit_predictions(const Protocol& q, const DirichletPrior& prior, const McConfig& cfg);

}  // namespace ldp
