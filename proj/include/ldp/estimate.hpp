#pragma once

// MetricEstimate: a numeric result together with how it was produced.
// Exact and quadrature results carry std_error = 0; only Monte Carlo
// estimates have a nonzero standard error.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ldp {

/// Raised when a metric's preconditions fail (non-faithful protocol,
/// degenerate prior, rejection budget blown, ...).
struct metric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Method { exact, monte_carlo, quadrature };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::exact: return "exact";
        case Method::monte_carlo: return "monte-carlo";
        case Method::quadrature: return "quadrature";
    }
    return "?";
}

struct MetricEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t sample_count = 0;
    std::uint64_t seed = 0;
    Method method = Method::exact;

    static MetricEstimate exact(double v) { return {v, 0.0, 0, 0, Method::exact}; }
    static MetricEstimate quad(double v) { return {v, 0.0, 0, 0, Method::quadrature}; }
    static MetricEstimate mc(double v, double se, std::size_t n, std::uint64_t seed) {
        return {v, se, n, seed, Method::monte_carlo};
    }
};

}  // namespace ldp
