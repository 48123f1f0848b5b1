#pragma once

// Exact finite-n metrics by enumeration over tally vectors: I(Y;P),
// I(Y;T), H(T) and the three utility ratios.
//
// P(S=s|P=p) carries the multinomial coefficient C_s = n!/prod(s_y!), so
//   I(S;P) = sum_s C_s (E[r_s log r_s] - E[r_s] log E[r_s]),
// with r_s(p) = prod_y (Qp)_y^{s_y}.  (The log C_s terms cancel inside the
// bracket; dropping C_s entirely would be wrong, which the full-joint
// oracle in the test suite certifies at n = 2.)
//
// Inner prior expectations run on 1-D adaptive quadrature for a = 2 and on
// Monte Carlo with common random numbers for a >= 3.  Permutation
// protocols (including the identity) use the closed Dirichlet form.

#include "ldp/estimate.hpp"
#include "ldp/prior.hpp"
#include "ldp/protocol.hpp"

namespace ldp {

struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EnumerationBudget {
    std::size_t max_states = 2'000'000;
    int max_n = 64;  // r_s products are evaluated in plain doubles; beyond this, refuse
    enum class Inner { automatic, quadrature, monte_carlo };
    Inner inner = Inner::automatic;
    McConfig mc;
    double quad_tol = 1e-11;
};

/// Number of weak compositions of n into k parts, saturating at +infinity.
double count_compositions(int n, int k);

/// In-place iteration over weak compositions; begin with (n, 0, ..., 0).
bool next_composition(std::vector<int>& s);

/// I(Y_vec; P) = I(S; P).
MetricEstimate mutual_info_reports_vs_p(const Protocol& q, const DirichletPrior& prior, int n,
                                        const EnumerationBudget& budget = {});

/// H(T) of the Dirichlet-multinomial tally vector; exact.
MetricEstimate entropy_tallies(const DirichletPrior& prior, int n, int a,
                               const EnumerationBudget& budget = {});

/// I(S; T), exact via enumeration of contingency tables with margins (s, t).
MetricEstimate mutual_info_reports_vs_tallies(const Protocol& q, const DirichletPrior& prior, int n,
                                              const EnumerationBudget& budget = {});

/// U^distr = I(Y;P) / I(X;P).
MetricEstimate distribution_utility(const Protocol& q, const DirichletPrior& prior, int n,
                                    const EnumerationBudget& budget = {});

/// U^tally = I(S;T) / H(T).
MetricEstimate tally_utility(const Protocol& q, const DirichletPrior& prior, int n,
                             const EnumerationBudget& budget = {});

/// U^digit = (I(Y;P) - h(P)) / (a-1); faithful protocols only.
MetricEstimate digit_utility(const Protocol& q, const DirichletPrior& prior, int n,
                             const EnumerationBudget& budget = {});

/// Average privacy recomputed from genuinely n-dependent quantities,
///   S_mu(n) = 1 - (H(Yvec|P) - H(Yvec|Xvec,P)) / H(Xvec|P),
/// every term enumerated at this n with quadrature prior integrals
/// (a = 2 only).  Used to check that the value does not depend on n.
MetricEstimate finite_avg_privacy(const Protocol& q, const DirichletPrior& prior, int n,
                                  const EnumerationBudget& budget = {});

}  // namespace ldp
