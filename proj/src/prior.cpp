#include "ldp/prior.hpp"

#include <cmath>
#include <numbers>

#include "ldp/math.hpp"
#include "ldp/mc.hpp"

namespace ldp {

DirichletPrior DirichletPrior::checked(std::vector<double> alpha) {
    if (alpha.size() < 2) throw validation_error("DirichletPrior: need a >= 2");
    for (double a : alpha)
        if (!(a > 0.0)) throw validation_error("DirichletPrior: parameters must be positive");
    return DirichletPrior{std::move(alpha)};
}

DirichletPrior jeffreys(int a) {
    if (a < 2) throw validation_error("jeffreys: need a >= 2");
    return DirichletPrior{std::vector<double>(a, 0.5)};
}

void for_each_block(std::size_t samples, std::size_t batch_size, int workers,
                    const std::function<void(std::size_t, std::size_t)>& fn) {
    if (samples < 1) throw validation_error("McConfig: sample count must be >= 1");
    if (batch_size == 0) batch_size = 4096;
    const std::size_t nblocks = (samples + batch_size - 1) / batch_size;
    auto block_count = [&](std::size_t bi) {
        const std::size_t begin = bi * batch_size;
        return std::min(batch_size, samples - begin);
    };
    if (workers <= 1 || nblocks <= 1) {
        for (std::size_t bi = 0; bi < nblocks; ++bi) fn(bi, block_count(bi));
        return;
    }
    const int nthreads = std::min<std::size_t>(workers, nblocks);
    std::vector<std::thread> threads;
    threads.reserve(nthreads);
    for (int w = 0; w < nthreads; ++w)
        threads.emplace_back([&, w] {
            for (std::size_t bi = w; bi < nblocks; bi += nthreads) fn(bi, block_count(bi));
        });
    for (auto& t : threads) t.join();
}

double prior_differential_entropy(const DirichletPrior& prior) {
    const int a = prior.size();
    double alpha0 = 0.0;
    for (double x : prior.alpha) alpha0 += x;
    double h = log_multivariate_beta(prior.alpha) + (alpha0 - a) * digamma(alpha0);
    for (double x : prior.alpha) h -= (x - 1.0) * digamma(x);
    return h;
}

namespace {
const double kHalfLog2PiE = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
}

MetricEstimate c_mu(const DirichletPrior& prior, const McConfig& cfg) {
    const int a = prior.size();
    if (prior.is_jeffreys()) {
        const double v = -kHalfLog2PiE + a / (2.0 * a - 2.0) * (digamma(a / 2.0) - digamma(0.5));
        return MetricEstimate::exact(v);
    }
    auto stats = mc_prior_moments<1>(prior, cfg, [&](std::span<const double> p, std::array<double, 1>& out) {
        double s = 0.0;
        for (double v : p) s += std::log(v);
        out[0] = -s / (2.0 * a - 2.0);
    });
    return MetricEstimate::mc(-kHalfLog2PiE + stats.mean[0], stats.std_error(0), cfg.samples, cfg.seed);
}

MetricEstimate baseline_secret_entropy(const DirichletPrior& prior, const McConfig& cfg) {
    const int a = prior.size();
    if (prior.is_jeffreys()) {
        return MetricEstimate::exact(digamma((a + 2.0) / 2.0) - digamma(1.5));
    }
    auto stats = mc_prior_moments<1>(prior, cfg, [&](std::span<const double> p, std::array<double, 1>& out) {
        out[0] = entropy(p);
    });
    return MetricEstimate::mc(stats.mean[0], stats.std_error(0), cfg.samples, cfg.seed);
}

}  // namespace ldp
