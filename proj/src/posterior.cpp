#include "ldp/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ldp/math.hpp"
#include "ldp/mc.hpp"

namespace ldp {

double PosteriorDensity::log_unnormalized(const SimplexPoint& p) const {
    double v = -log_multivariate_beta(prior.alpha);
    for (int x = 0; x < protocol.input_size(); ++x)
        v += (prior.alpha[x] - 1.0) * std::log(p.p[x]);
    for (int y = 0; y < protocol.output_size(); ++y) {
        if (!tallies[y]) continue;
        double s = 0.0;
        for (int x = 0; x < protocol.input_size(); ++x) s += protocol.entry(y, x) * p.p[x];
        v += s > 0.0 ? tallies[y] * std::log(s) : -kInfinity;
    }
    return v;
}

double DirichletMixture::density(const SimplexPoint& p) const {
    double v = 0.0;
    for (const auto& comp : components) {
        double logd = -log_multivariate_beta(comp.alpha);
        for (std::size_t x = 0; x < comp.alpha.size(); ++x)
            logd += (comp.alpha[x] - 1.0) * std::log(p.p[x]);
        v += comp.weight * std::exp(logd);
    }
    return v;
}

double DirichletMixture::marginal_cdf(int x, double value) const {
    double v = 0.0;
    for (const auto& comp : components) {
        double alpha0 = 0.0;
        for (double a : comp.alpha) alpha0 += a;
        v += comp.weight * betainc_reg(comp.alpha[x], alpha0 - comp.alpha[x], value);
    }
    return v;
}

void DirichletMixture::moments(std::vector<double>& mean, std::vector<double>& variance) const {
    const std::size_t a = components.empty() ? 0 : components[0].alpha.size();
    mean.assign(a, 0.0);
    variance.assign(a, 0.0);
    std::vector<double> second(a, 0.0);
    for (const auto& comp : components) {
        double alpha0 = 0.0;
        for (double v : comp.alpha) alpha0 += v;
        for (std::size_t x = 0; x < a; ++x) {
            const double m1 = comp.alpha[x] / alpha0;
            const double m2 = comp.alpha[x] * (comp.alpha[x] + 1.0) / (alpha0 * (alpha0 + 1.0));
            mean[x] += comp.weight * m1;
            second[x] += comp.weight * m2;
        }
    }
    for (std::size_t x = 0; x < a; ++x) variance[x] = second[x] - mean[x] * mean[x];
}

PosteriorDensity posterior_unnormalized(const Protocol& q, const DirichletPrior& prior,
                                        std::vector<int> tallies) {
    if (static_cast<int>(tallies.size()) != q.output_size())
        throw validation_error("TallyLengthMismatch: need one tally per output");
    for (int s : tallies)
        if (s < 0) throw validation_error("TallyLengthMismatch: negative tally");
    if (prior.size() != q.input_size())
        throw validation_error("posterior_unnormalized: prior dimension mismatch");
    return PosteriorDensity{q, prior, std::move(tallies), std::nullopt};
}

MetricEstimate normalize_mc(const PosteriorDensity& density, const McConfig& cfg) {
    const Protocol& q = density.protocol;
    const std::size_t nblocks = (cfg.samples + cfg.batch_size - 1) / cfg.batch_size;
    std::vector<ScaledMeanAccumulator> partials(nblocks);
    for_each_block(cfg.samples, cfg.batch_size, cfg.workers, [&](std::size_t bi, std::size_t count) {
        Xoshiro256pp rng(subseed(cfg.seed, bi));
        std::vector<double> p(q.input_size());
        for (std::size_t i = 0; i < count; ++i) {
            rng.next_dirichlet(density.prior.alpha, p);
            double logw = 0.0;
            for (int y = 0; y < q.output_size(); ++y) {
                if (!density.tallies[y]) continue;
                double s = 0.0;
                for (int x = 0; x < q.input_size(); ++x) s += q.entry(y, x) * p[x];
                logw += s > 0.0 ? density.tallies[y] * std::log(s) : -kInfinity;
            }
            partials[bi].add_log(logw);
        }
    });
    ScaledMeanAccumulator total;
    for (const auto& part : partials) total.merge(part);
    if (total.all_underflowed())
        throw metric_error("AllSamplesUnderflow: no prior sample had positive likelihood");
    return MetricEstimate::mc(total.mean(), total.std_error(), cfg.samples, cfg.seed);
}

DirichletMixture posterior_dirichlet_mixture(const Protocol& q, const DirichletPrior& prior,
                                             const std::vector<int>& tallies,
                                             const EnumerationBudget& budget) {
    PosteriorDensity density = posterior_unnormalized(q, prior, tallies);
    const int a = q.input_size();
    const int b = q.output_size();
    int n = 0;
    for (int s : tallies) n += s;

    // When all columns agree the likelihood is constant in p and the
    // posterior is the prior itself.
    if (q.has_identical_columns() || n == 0) {
        double log_c = 0.0;
        for (int y = 0; y < b; ++y)
            if (tallies[y]) log_c += tallies[y] * std::log(q.entry(y, 0));
        DirichletMixture mix;
        mix.components.push_back({1.0, prior.alpha});
        mix.normalizer = MetricEstimate::exact(std::exp(log_c));
        return mix;
    }

    // Budget: per output y the margin row has C(s_y + supp_y - 1, supp_y - 1)
    // arrangements over the inputs that can actually produce y.
    double states = 1.0;
    for (int y = 0; y < b; ++y) {
        int supp = 0;
        for (int x = 0; x < a; ++x)
            if (q.entry(y, x) > 0.0) ++supp;
        states *= count_compositions(tallies[y], supp);
        if (states > double(budget.max_states))
            throw budget_error("BudgetExceeded: posterior mixture enumeration too large");
    }

    // Enumerate margin matrices M (row y sums to s_y, only feasible cells),
    // keyed by the input tally t = column sums; log-space accumulation.
    std::map<std::vector<int>, double> log_weight_by_tally;  // LSE-merged
    std::vector<int> tally(a, 0);
    std::function<void(int, double)> recurse = [&](int y, double log_acc) {
        if (y == b) {
            auto [it, inserted] = log_weight_by_tally.try_emplace(tally, log_acc);
            if (!inserted) {
                const double hi = std::max(it->second, log_acc);
                it->second = hi + std::log(std::exp(it->second - hi) + std::exp(log_acc - hi));
            }
            return;
        }
        if (!tallies[y]) {
            recurse(y + 1, log_acc);
            return;
        }
        std::vector<int> feasible;
        for (int x = 0; x < a; ++x)
            if (q.entry(y, x) > 0.0) feasible.push_back(x);
        std::vector<int> m(feasible.size(), 0);
        m[0] = tallies[y];
        do {
            double lw = log_factorial(tallies[y]);
            for (std::size_t j = 0; j < feasible.size(); ++j) {
                lw += m[j] * std::log(q.entry(y, feasible[j])) - log_factorial(m[j]);
                tally[feasible[j]] += m[j];
            }
            recurse(y + 1, log_acc + lw);
            for (std::size_t j = 0; j < feasible.size(); ++j) tally[feasible[j]] -= m[j];
        } while (next_composition(m));
    };
    recurse(0, 0.0);

    // weight(t) *= B(alpha + t)/B(alpha); normalize.
    const double log_b_alpha = log_multivariate_beta(prior.alpha);
    double max_log = -kInfinity;
    std::vector<std::pair<std::vector<double>, double>> comps;  // (alpha+t, log weight)
    for (const auto& [t, lw] : log_weight_by_tally) {
        std::vector<double> shifted(a);
        for (int x = 0; x < a; ++x) shifted[x] = prior.alpha[x] + t[x];
        const double lwt = lw + log_multivariate_beta(shifted) - log_b_alpha;
        max_log = std::max(max_log, lwt);
        comps.emplace_back(std::move(shifted), lwt);
    }
    double total = 0.0;
    for (const auto& [alpha, lw] : comps) total += std::exp(lw - max_log);
    DirichletMixture mix;
    mix.normalizer = MetricEstimate::exact(std::exp(max_log) * total);
    mix.components.reserve(comps.size());
    for (auto& [alpha, lw] : comps)
        mix.components.push_back({std::exp(lw - max_log) / total, std::move(alpha)});
    std::sort(mix.components.begin(), mix.components.end(),
              [](const auto& l, const auto& r) { return l.weight > r.weight; });
    return mix;
}

PosteriorDensity grr_posterior(int a, double epsilon, const std::vector<int>& tallies,
                               const EnumerationBudget& budget) {
    if (static_cast<int>(tallies.size()) != a)
        throw validation_error("TallyLengthMismatch: GRR tallies must have length a");
    const double beta = std::expm1(epsilon);
    int n = 0;
    double lattice = 1.0;
    for (int s : tallies) {
        if (s < 0) throw validation_error("TallyLengthMismatch: negative tally");
        n += s;
        lattice *= double(s) + 1.0;
        if (lattice > double(budget.max_states))
            throw budget_error("BudgetExceeded: GRR posterior k-lattice too large");
    }

    // C_k = sum_{k <= s} B(k + alpha) beta^{|k|} prod C(s_x, k_x), via LSE.
    const std::vector<double> alpha(a, 0.5);
    std::vector<double> shifted(a);
    std::vector<int> k(a, 0);
    std::vector<double> logs;
    for (;;) {
        int ksum = 0;
        double lt = 0.0;
        for (int x = 0; x < a; ++x) {
            ksum += k[x];
            lt += log_binomial(tallies[x], k[x]);
            shifted[x] = alpha[x] + k[x];
        }
        lt += log_multivariate_beta(shifted);
        if (ksum > 0) lt += beta > 0.0 ? ksum * std::log(beta) : -kInfinity;
        if (std::isfinite(lt)) logs.push_back(lt);
        int pos = 0;
        while (pos < a && k[pos] == tallies[pos]) k[pos++] = 0;
        if (pos == a) break;
        ++k[pos];
    }
    // Express the normalizer in the P(Yvec = yvec) convention:
    // C = C_k / (B(alpha) (a + beta)^n).
    const double log_c = log_sum_exp(logs) - log_multivariate_beta(alpha) -
                         double(n) * std::log(a + beta);

    // The same object as posterior_unnormalized(grr(a, eps), jeffreys(a), s),
    // with the exact normalizer attached.
    PosteriorDensity density = posterior_unnormalized(
        [&] {
            std::vector<std::vector<double>> rows(a, std::vector<double>(a, 1.0 / (a + beta)));
            for (int i = 0; i < a; ++i) rows[i][i] = (1.0 + beta) / (a + beta);
            return build_protocol(std::move(rows));
        }(),
        jeffreys(a), tallies);
    density.normalizer = MetricEstimate::exact(std::exp(log_c));
    return density;
}

PosteriorMoments posterior_moments(const DirichletMixture& mixture) {
    PosteriorMoments out;
    mixture.moments(out.mean, out.variance);
    out.method = Method::exact;
    return out;
}

PosteriorMoments posterior_moments(const PosteriorDensity& density, const McConfig& cfg) {
    const Protocol& q = density.protocol;
    const int a = q.input_size();
    const std::size_t nblocks = (cfg.samples + cfg.batch_size - 1) / cfg.batch_size;
    struct Partial {
        ScaledMeanAccumulator w;
        std::vector<ScaledMeanAccumulator> wx, wxx;
    };
    std::vector<Partial> partials(nblocks);
    for (auto& part : partials) {
        part.wx.resize(a);
        part.wxx.resize(a);
    }
    for_each_block(cfg.samples, cfg.batch_size, cfg.workers, [&](std::size_t bi, std::size_t count) {
        Xoshiro256pp rng(subseed(cfg.seed, bi));
        std::vector<double> p(a);
        for (std::size_t i = 0; i < count; ++i) {
            rng.next_dirichlet(density.prior.alpha, p);
            double logw = 0.0;
            for (int y = 0; y < q.output_size(); ++y) {
                if (!density.tallies[y]) continue;
                double s = 0.0;
                for (int x = 0; x < a; ++x) s += q.entry(y, x) * p[x];
                logw += s > 0.0 ? density.tallies[y] * std::log(s) : -kInfinity;
            }
            partials[bi].w.add_log(logw);
            for (int x = 0; x < a; ++x) {
                partials[bi].wx[x].add_log(logw + std::log(p[x]));
                partials[bi].wxx[x].add_log(logw + 2.0 * std::log(p[x]));
            }
        }
    });
    ScaledMeanAccumulator w;
    std::vector<ScaledMeanAccumulator> wx(a), wxx(a);
    for (const auto& part : partials) {
        w.merge(part.w);
        for (int x = 0; x < a; ++x) {
            wx[x].merge(part.wx[x]);
            wxx[x].merge(part.wxx[x]);
        }
    }
    if (w.all_underflowed())
        throw metric_error("AllSamplesUnderflow: posterior moments");
    // Effective sample size of the importance weights.
    const double mean_w = w.mean();
    const double se_w = w.std_error();
    const double n = double(cfg.samples);
    const double var_w = se_w * se_w * n;
    const double ess = n * mean_w * mean_w / (var_w + mean_w * mean_w);
    if (ess < 100.0) {
        std::ostringstream msg;
        msg << "EffectiveSampleSizeTooLow: ESS = " << ess << " < 100";
        throw metric_error(msg.str());
    }
    PosteriorMoments out;
    out.method = Method::monte_carlo;
    out.sample_count = cfg.samples;
    out.effective_sample_size = ess;
    out.mean.resize(a);
    out.variance.resize(a);
    for (int x = 0; x < a; ++x) {
        out.mean[x] = wx[x].mean() / mean_w;
        out.variance[x] = wxx[x].mean() / mean_w - out.mean[x] * out.mean[x];
    }
    return out;
}

}  // namespace ldp
