#include "ldp/metrics_population.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ldp/linalg.hpp"
#include "ldp/math.hpp"
#include "ldp/mc.hpp"

namespace ldp {

namespace {

const double kHalfLog2PiE = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);

// H(Y|X=x) per input column, exact.
std::vector<double> column_entropies(const Protocol& q) {
    std::vector<double> h(q.input_size(), 0.0);
    for (int x = 0; x < q.input_size(); ++x)
        for (int y = 0; y < q.output_size(); ++y) h[x] -= xlogx(q.entry(y, x));
    return h;
}

// log det(Q^T D_p Q) for one sample; returns false when some (Qp)_y
// falls below the rejection floor.
bool sample_log_det(const Protocol& q, std::span<const double> p, double floor, double& out) {
    const int a = q.input_size();
    const int b = q.output_size();
    std::vector<double> push(b);
    for (int y = 0; y < b; ++y) {
        double s = 0.0;
        for (int x = 0; x < a; ++x) s += q.entry(y, x) * p[x];
        if (s < floor) return false;
        push[y] = s;
    }
    std::vector<double> m(std::size_t(a) * a, 0.0);
    for (int y = 0; y < b; ++y) {
        const double inv = 1.0 / push[y];
        for (int x = 0; x < a; ++x) {
            const double qyx = q.entry(y, x);
            if (qyx == 0.0) continue;
            for (int x2 = x; x2 < a; ++x2)
                m[std::size_t(x) * a + x2] += qyx * q.entry(y, x2) * inv;
        }
    }
    for (int x = 0; x < a; ++x)
        for (int x2 = 0; x2 < x; ++x2) m[std::size_t(x) * a + x2] = m[std::size_t(x2) * a + x];
    out = spd_log_det(m, a);
    return true;
}

}  // namespace

MetricEstimate avg_privacy(const Protocol& q, const DirichletPrior& prior, const McConfig& cfg) {
    if (prior.size() != q.input_size())
        throw validation_error("avg_privacy: prior dimension mismatch");
    const auto col_h = column_entropies(q);
    // out[0] = H(Y|P=p) - H(Y|X,P=p)  (the per-user leakage), out[1] = H(X|P=p)
    auto stats = mc_prior_moments<2>(prior, cfg, [&](std::span<const double> p, std::array<double, 2>& out) {
        double hy = 0.0;
        for (int y = 0; y < q.output_size(); ++y) {
            double s = 0.0;
            for (int x = 0; x < q.input_size(); ++x) s += q.entry(y, x) * p[x];
            hy -= xlogx(s);
        }
        double hyx = 0.0, hx = 0.0;
        for (int x = 0; x < q.input_size(); ++x) {
            hyx += p[x] * col_h[x];
            hx -= xlogx(p[x]);
        }
        out[0] = hy - hyx;
        out[1] = hx;
    });
    if (stats.mean[1] < 1e-9)
        throw metric_error("DegeneratePrior: estimated H(X|P) is numerically zero");
    auto [leak, se] = stats.ratio(0, 1);
    return MetricEstimate::mc(1.0 - leak, se, cfg.samples, cfg.seed);
}

MetricEstimate asymptotic_utility(const Protocol& q, const DirichletPrior& prior,
                                  const McConfig& cfg, const RejectionPolicy& policy) {
    if (prior.size() != q.input_size())
        throw validation_error("asymptotic_utility: prior dimension mismatch");
    if (!analyze_structure(q).faithful)
        throw metric_error("NotFaithful: asymptotic utility requires rank(Q) = a");
    const int a = q.input_size();
    std::atomic<std::size_t> rejected{0};
    auto stats = mc_prior_moments<1>(prior, cfg, [&](std::span<const double> p, std::array<double, 1>& out) {
        double ld;
        if (sample_log_det(q, p, policy.pushforward_floor, ld)) {
            out[0] = ld / (2.0 * a - 2.0);
        } else {
            rejected.fetch_add(1, std::memory_order_relaxed);
            out[0] = 0.0;
        }
    });
    if (double(rejected.load()) > policy.max_rejected_fraction * double(cfg.samples)) {
        std::ostringstream msg;
        msg << "TooManyRejections: " << rejected.load() << " of " << cfg.samples
            << " samples under the pushforward floor";
        throw metric_error(msg.str());
    }
    return MetricEstimate::mc(-kHalfLog2PiE + stats.mean[0], stats.std_error(0), cfg.samples, cfg.seed);
}

MetricEstimate effective_participation(const Protocol& q, const DirichletPrior& prior,
                                       const McConfig& cfg, const RejectionPolicy& policy) {
    if (!analyze_structure(q).faithful) return MetricEstimate::exact(0.0);
    const int a = q.input_size();
    std::atomic<std::size_t> rejected{0};
    // U^as - C_mu = E[(log det(Q^T D_P Q) + sum_x log P_x) / (2a-2)], one pass.
    auto stats = mc_prior_moments<1>(prior, cfg, [&](std::span<const double> p, std::array<double, 1>& out) {
        double ld;
        if (sample_log_det(q, p, policy.pushforward_floor, ld)) {
            double logs = 0.0;
            for (double v : p) logs += std::log(v);
            out[0] = (ld + logs) / (2.0 * a - 2.0);
        } else {
            rejected.fetch_add(1, std::memory_order_relaxed);
            out[0] = 0.0;
        }
    });
    if (double(rejected.load()) > policy.max_rejected_fraction * double(cfg.samples))
        throw metric_error("TooManyRejections: effective_participation");
    const double f = std::exp(2.0 * stats.mean[0]);
    return MetricEstimate::mc(f, 2.0 * f * stats.std_error(0), cfg.samples, cfg.seed);
}

TradeoffBounds tradeoff_bounds(const Protocol& q, const DirichletPrior& prior, const McConfig& cfg) {
    const double swc = worst_case_privacy(q);
    if (swc <= 0.0 || swc >= 1.0)
        throw metric_error("DegenerateWorstCase: tradeoff bounds need S^wc strictly inside (0, 1)");
    const double odds = (1.0 - swc) / swc;
    TradeoffBounds out;
    out.utility_bound = MetricEstimate::exact(-kHalfLog2PiE + std::log(odds));
    const MetricEstimate c = c_mu(prior, cfg);
    const double scale = odds * odds / (2.0 * std::numbers::pi * std::numbers::e);
    const double value = std::exp(-2.0 * c.value) * scale;
    if (c.method == Method::exact) {
        out.participation_bound = MetricEstimate::exact(value);
    } else {
        out.participation_bound =
            MetricEstimate::mc(value, 2.0 * value * c.std_error, c.sample_count, c.seed);
    }
    return out;
}

LimitPrediction limit_predictions(const Protocol& q, const DirichletPrior& prior, const McConfig& cfg) {
    const auto analysis = analyze_structure(q);
    const int a = q.input_size();
    LimitPrediction out;
    out.u_distr_limit = double(analysis.rank - 1) / double(a - 1);
    out.u_tally_limit = double(analysis.rank + analysis.class_count - 2) / double(2 * a - 2);
    if (analysis.faithful) {
        const MetricEstimate uas = asymptotic_utility(q, prior, cfg);
        const MetricEstimate c = c_mu(prior, cfg);
        out.digit_intercept = uas;
        const double scale_se = 2.0 * std::hypot(uas.std_error, c.std_error);
        MetricEstimate scale = MetricEstimate::mc(2.0 * (c.value - uas.value), scale_se, cfg.samples, cfg.seed);
        if (scale_se == 0.0) scale.method = uas.method;
        out.one_minus_udistr_scale = scale;
        const double h = prior_differential_entropy(prior);
        out.r_mu = MetricEstimate::mc((a - 1) * uas.value + h, (a - 1) * uas.std_error,
                                      uas.sample_count, uas.seed);
    }
    return out;
}

}  // namespace ldp
