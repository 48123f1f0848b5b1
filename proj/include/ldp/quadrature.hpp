#pragma once

// Deterministic one-dimensional quadrature used for prior expectations
// that reduce to beta-weighted integrals on [0, 1].
//
// The substitution t = sin^2(phi) removes the endpoint singularities of
// the Beta(a, b) weight for a, b >= 1/2, after which Gauss-Legendre
// converges spectrally for the smooth integrands that occur here.  Node
// counts are doubled until two successive estimates agree to the
// requested tolerance.

#include <functional>
#include <span>
#include <vector>

namespace ldp {

struct QuadratureOptions {
    double tolerance = 1e-11;  // relative to |estimate| + 1
    int initial_nodes = 32;
    int max_nodes = 8192;
};

/// Gauss-Legendre nodes and weights on [-1, 1]; cached per node count.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLegendreRule& gauss_legendre(int n);

/// E[f(T)] for T ~ Beta(a, b).  Requires a, b > 0; intended for a, b >= 1/2.
double beta_expectation(double a, double b, const std::function<double(double)>& f,
                        const QuadratureOptions& opts = {});

/// Integral of f over [0, 1] with a plain (weightless) adaptive Gauss-Legendre rule.
double integrate_unit(const std::function<double(double)>& f, const QuadratureOptions& opts = {});

}  // namespace ldp
