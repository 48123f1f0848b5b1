#pragma once

// Special functions and numerically careful accumulation helpers.
// All logarithms in this project are natural, and 0*log(0) is taken as 0.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace ldp {

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Digamma function for x > 0, accurate to ~1e-14 relative
/// (upward recurrence into the asymptotic regime, then the standard
/// Bernoulli-number series).  Throws on x <= 0.
double digamma(double x);

/// log of the multivariate beta function, sum(lgamma(a_i)) - lgamma(sum(a_i)).
double log_multivariate_beta(std::span<const double> alpha);

/// log(n!) exact for small integers, lgamma otherwise.
double log_factorial(std::uint64_t n);

/// log of the binomial coefficient C(n, k).
double log_binomial(std::uint64_t n, std::uint64_t k);

/// Regularized incomplete beta function I_x(a, b) via the Lentz continued fraction.
double betainc_reg(double a, double b, double x);

/// x*log(x) with the 0*log(0) = 0 convention.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// Shannon entropy of a distribution (natural log).
inline double entropy(std::span<const double> p) {
    double h = 0.0;
    for (double v : p) h -= xlogx(v);
    return h;
}

/// Neumaier compensated summation; add() keeps the running error term.
class CompensatedSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Streaming mean of positive terms kept as (max log, scaled sums) so that
/// values spanning hundreds of orders of magnitude do not over/underflow.
/// Used for Monte Carlo normalizers where the summands are exp(log w).
class ScaledMeanAccumulator {
  public:
    void add_log(double logw) {
        if (logw == -std::numeric_limits<double>::infinity()) {
            ++count_;
            return;
        }
        if (logw > max_log_) {
            const double rescale = std::exp(max_log_ - logw);
            sum_ *= rescale;
            sumsq_ *= rescale * rescale;
            max_log_ = logw;
        }
        const double w = std::exp(logw - max_log_);
        sum_ += w;
        sumsq_ += w * w;
        ++count_;
    }
    void merge(const ScaledMeanAccumulator& other) {
        if (other.count_ == 0) return;
        if (other.sum_ <= 0.0) {  // partial that saw only underflowed weights
            count_ += other.count_;
            return;
        }
        if (other.max_log_ > max_log_) {
            const double rescale = std::exp(max_log_ - other.max_log_);
            sum_ *= rescale;
            sumsq_ *= rescale * rescale;
            max_log_ = other.max_log_;
        }
        const double rescale = std::exp(other.max_log_ - max_log_);
        sum_ += other.sum_ * rescale;
        sumsq_ += other.sumsq_ * rescale * rescale;
        count_ += other.count_;
    }
    std::size_t count() const { return count_; }
    bool all_underflowed() const { return count_ > 0 && sum_ <= 0.0; }
    /// Mean of the weights in linear scale.
    double mean() const { return count_ ? std::exp(max_log_) * (sum_ / double(count_)) : 0.0; }
    /// Standard error of the mean.
    double std_error() const {
        if (count_ < 2 || sum_ <= 0.0) return 0.0;
        const double n = double(count_);
        const double m = sum_ / n;
        double var = (sumsq_ / n - m * m) * n / (n - 1.0);
        if (var < 0.0) var = 0.0;
        return std::exp(max_log_) * std::sqrt(var / n);
    }
    double log_mean() const {
        if (count_ == 0 || sum_ <= 0.0) return -std::numeric_limits<double>::infinity();
        return max_log_ + std::log(sum_ / double(count_));
    }

  private:
    double max_log_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
    double sumsq_ = 0.0;
    std::size_t count_ = 0;
};

/// log(sum(exp(logs))) with max shift.
double log_sum_exp(std::span<const double> logs);

}  // namespace ldp
