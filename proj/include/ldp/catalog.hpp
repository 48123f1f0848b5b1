#pragma once

// Built-in protocol constructors and their protocol-specific closed forms.
//
// Unary encoding outputs are subsets of the input alphabet, encoded as
// bitmasks: output index y has bit (x-1) set iff input symbol x is in the
// reported set (inputs are 1-based in labels, 0-based in code).

#include "ldp/estimate.hpp"
#include "ldp/metrics_finite.hpp"
#include "ldp/prior.hpp"
#include "ldp/protocol.hpp"

namespace ldp {

/// Generalized randomized response: keeps the value with probability
/// e^eps/(e^eps + a - 1), otherwise reports one of the others uniformly.
Protocol grr(int a, double epsilon);

struct UeParams {
    double kappa = 0.5;
    double lambda = 0.5;
};

/// Unary encoding: report a subset containing the true value with
/// probability kappa and each other value with probability lambda.
/// Requires kappa >= lambda and a <= 12 (the output set has 2^a elements).
Protocol unary_encoding(int a, const UeParams& params);

/// The three standard UE parametrizations at LDP level eps.
Protocol rappor_basic(int a, double epsilon);  // kappa = e^{eps/2}/(e^{eps/2}+1), lambda = 1 - kappa
Protocol oue(int a, double epsilon);           // kappa = 1/2, lambda = 1/(e^eps+1)
Protocol blh(int a, double epsilon);           // kappa = e^eps/(e^eps+1), lambda = 1/2; a is the hashed domain

/// Local hash: pick one of the g^a hash functions h: A -> {1..g} uniformly,
/// then run GRR^{g,eps} on h(x); the output is the pair (h, report).
/// All hash functions are enumerated exactly.
Protocol local_hash(int a, int g, double epsilon, std::size_t output_cap = 1u << 20);

/// Deterministic protocols.
Protocol parity(int a);       // reports the input value mod 2; a must be even
Protocol identity(int a);
Protocol deterministic(const std::vector<int>& targets, int num_outputs);

/// UE parameters of the named variants.
UeParams rappor_params(double epsilon);
UeParams oue_params(double epsilon);
UeParams blh_params(double epsilon);

// --- closed forms (Jeffreys prior) -------------------------------------

/// S_mu(GRR^{a,eps}) by one-dimensional quadrature over Beta(1/2, (a-1)/2).
MetricEstimate grr_avg_privacy_closed(int a, double epsilon);

/// U^as(GRR^{a,eps}); eps = 0 yields -infinity (log beta term).
MetricEstimate grr_asymptotic_utility_closed(int a, double epsilon);

/// I(Y;P) for GRR under the Jeffreys prior via the k-lattice expansion;
/// exact up to the one-dimensional quadrature in the entropy rate term.
MetricEstimate grr_mutual_info_closed(int a, double epsilon, int n,
                                      const EnumerationBudget& budget = {});

/// S_mu(UE^{a,kappa,lambda}) via a+1 one-dimensional beta expectations.
MetricEstimate ue_avg_privacy_closed(int a, const UeParams& params);

/// I(Y;P) for UE under the Jeffreys prior via the (s, k, (m^y)) lattice sums.
MetricEstimate ue_mutual_info_closed(int a, const UeParams& params, int n,
                                     const EnumerationBudget& budget = {});

}  // namespace ldp
