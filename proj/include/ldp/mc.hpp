#pragma once

// Blockwise Monte Carlo over prior samples.
//
// The sample index space is split into fixed blocks; block i draws from a
// generator seeded with subseed(cfg.seed, i).  Per-block partials are
// combined in block order with compensated summation, so the result is
// bitwise identical for any worker count, and two metrics evaluated with
// the same (prior, seed) consume the same sample stream (common random
// numbers).

#include <array>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

#include "ldp/math.hpp"
#include "ldp/prior.hpp"
#include "ldp/rng.hpp"

namespace ldp {

/// Runs fn(block_index, sample_count_in_block) for every block, possibly on
/// several threads.  fn must only touch state owned by its block.
void for_each_block(std::size_t samples, std::size_t batch_size, int workers,
                    const std::function<void(std::size_t, std::size_t)>& fn);

/// First and second moments of K statistics of a prior draw.
template <int K>
struct MomentStats {
    std::size_t n = 0;
    std::array<double, K> mean{};
    std::array<std::array<double, K>, K> cov_mean{};  // covariance of the means

    double std_error(int k) const { return cov_mean[k][k] > 0 ? std::sqrt(cov_mean[k][k]) : 0.0; }
    /// Delta-method estimate and standard error of mean[i]/mean[j].
    std::pair<double, double> ratio(int i, int j) const {
        const double r = mean[i] / mean[j];
        const double var = (cov_mean[i][i] + r * r * cov_mean[j][j] - 2.0 * r * cov_mean[i][j]) /
                           (mean[j] * mean[j]);
        return {r, var > 0 ? std::sqrt(var) : 0.0};
    }
};

/// per_sample(p, out) fills K statistics for one prior draw p.
template <int K, class F>
MomentStats<K> mc_prior_moments(const DirichletPrior& prior, const McConfig& cfg, F&& per_sample) {
    const std::size_t nblocks = (cfg.samples + cfg.batch_size - 1) / cfg.batch_size;
    struct Partial {
        std::array<double, K> sum{};
        std::array<std::array<double, K>, K> sum2{};
    };
    std::vector<Partial> partials(nblocks);

    for_each_block(cfg.samples, cfg.batch_size, cfg.workers, [&](std::size_t bi, std::size_t count) {
        Xoshiro256pp rng(subseed(cfg.seed, bi));
        std::vector<double> p(prior.size());
        std::array<double, K> out{};
        Partial& part = partials[bi];
        for (std::size_t i = 0; i < count; ++i) {
            rng.next_dirichlet(prior.alpha, p);
            per_sample(std::span<const double>(p), out);
            for (int k = 0; k < K; ++k) {
                part.sum[k] += out[k];
                for (int l = k; l < K; ++l) part.sum2[k][l] += out[k] * out[l];
            }
        }
    });

    std::array<CompensatedSum, K> total;
    std::array<std::array<CompensatedSum, K>, K> total2;
    for (const Partial& part : partials)
        for (int k = 0; k < K; ++k) {
            total[k].add(part.sum[k]);
            for (int l = k; l < K; ++l) total2[k][l].add(part.sum2[k][l]);
        }

    MomentStats<K> stats;
    stats.n = cfg.samples;
    const double n = double(cfg.samples);
    for (int k = 0; k < K; ++k) stats.mean[k] = total[k].value() / n;
    for (int k = 0; k < K; ++k)
        for (int l = k; l < K; ++l) {
            double cov = (total2[k][l].value() - n * stats.mean[k] * stats.mean[l]) / (n - 1.0);
            stats.cov_mean[k][l] = stats.cov_mean[l][k] = cov / n;
        }
    return stats;
}

}  // namespace ldp
