#pragma once

// Seed-reproducible random number generation.
//
// The generator is xoshiro256++ seeded through splitmix64, so a given
// 64-bit seed produces the same stream on every platform.  Normal
// variates use the Box-Muller transform, gamma variates the
// Marsaglia-Tsang squeeze (with the alpha < 1 boost), and Dirichlet
// draws are normalized independent gammas.  Parallel Monte Carlo
// derives one subseed per block from (master seed, block index), so
// results do not depend on the worker count.

#include <array>
#include <cstdint>
#include <cmath>
#include <span>
#include <vector>

namespace ldp {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic subseed for block `index` of a stream with the given master seed.
inline std::uint64_t subseed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (0x6a09e667f3bcc909ULL + index);
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1); never returns 0 so logs are safe.
    double next_open() {
        double u = next_double();
        while (u <= 0.0) u = next_double();
        return u;
    }

    /// Standard normal via Box-Muller (two uniforms per variate).
    double next_normal() {
        const double u1 = next_open();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    /// Gamma(alpha, 1) via Marsaglia-Tsang.
    double next_gamma(double alpha) {
        if (alpha < 1.0) {
            const double u = next_open();
            return next_gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
        }
        const double d = alpha - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = next_normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = next_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Dirichlet(alpha) draw written into `out` (same length as alpha).
    void next_dirichlet(std::span<const double> alpha, std::span<double> out) {
        double sum = 0.0;
        do {
            sum = 0.0;
            for (std::size_t i = 0; i < alpha.size(); ++i) {
                out[i] = next_gamma(alpha[i]);
                sum += out[i];
            }
        } while (sum <= 0.0);
        for (std::size_t i = 0; i < alpha.size(); ++i) out[i] /= sum;
    }

    /// Index in [0, n) drawn from the discrete distribution `weights` (sum ~ 1).
    int next_discrete(std::span<const double> weights) {
        double u = next_double();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> state_{};
};

}  // namespace ldp
