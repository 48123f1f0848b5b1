#include "ldp/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "ldp/math.hpp"

namespace ldp {

namespace {

GaussLegendreRule compute_rule(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton iteration on P_n, symmetric in the roots.
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
    static std::map<int, GaussLegendreRule> cache;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

namespace {

double beta_estimate(double a, double b, const std::function<double(double)>& f, int n) {
    // t = sin^2(phi), phi in [0, pi/2]:
    //   t^{a-1}(1-t)^{b-1} dt = 2 sin^{2a-1}(phi) cos^{2b-1}(phi) dphi
    const auto& rule = gauss_legendre(n);
    const double half = std::numbers::pi / 4.0;
    CompensatedSum acc;
    for (int i = 0; i < n; ++i) {
        const double phi = half * (rule.nodes[i] + 1.0);
        const double s = std::sin(phi);
        const double c = std::cos(phi);
        const double t = s * s;
        const double w = 2.0 * std::pow(s, 2.0 * a - 1.0) * std::pow(c, 2.0 * b - 1.0);
        acc.add(rule.weights[i] * half * w * f(t));
    }
    return acc.value() / std::exp(log_multivariate_beta(std::array{a, b}));
}

}  // namespace

double beta_expectation(double a, double b, const std::function<double(double)>& f,
                        const QuadratureOptions& opts) {
    if (!(a > 0.0) || !(b > 0.0)) throw numeric_error("NonPositiveArgument: beta_expectation parameters");
    double prev = beta_estimate(a, b, f, opts.initial_nodes);
    for (int n = 2 * opts.initial_nodes; n <= opts.max_nodes; n *= 2) {
        const double cur = beta_estimate(a, b, f, n);
        if (std::abs(cur - prev) <= opts.tolerance * (std::abs(cur) + 1.0)) return cur;
        prev = cur;
    }
    return prev;
}

double integrate_unit(const std::function<double(double)>& f, const QuadratureOptions& opts) {
    auto estimate = [&](int n) {
        const auto& rule = gauss_legendre(n);
        CompensatedSum acc;
        for (int i = 0; i < n; ++i)
            acc.add(rule.weights[i] * 0.5 * f(0.5 * (rule.nodes[i] + 1.0)));
        return acc.value();
    };
    double prev = estimate(opts.initial_nodes);
    for (int n = 2 * opts.initial_nodes; n <= opts.max_nodes; n *= 2) {
        const double cur = estimate(n);
        if (std::abs(cur - prev) <= opts.tolerance * (std::abs(cur) + 1.0)) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace ldp
