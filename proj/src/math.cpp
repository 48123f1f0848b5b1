#include "ldp/math.hpp"

#include <algorithm>
#include <limits>

namespace ldp {

double digamma(double x) {
    if (!(x > 0.0)) throw numeric_error("NonPositiveArgument: digamma requires x > 0");
    double result = 0.0;
    // Recur upward until the asymptotic series is accurate.
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    // psi(x) ~ log x - 1/(2x) - sum B_{2k}/(2k x^{2k})
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = std::log(x) - 0.5 * inv;
    series -= inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    return result + series;
}

double log_multivariate_beta(std::span<const double> alpha) {
    double sum = 0.0;
    double total = 0.0;
    for (double a : alpha) {
        if (!(a > 0.0)) throw numeric_error("NonPositiveArgument: beta function parameters must be positive");
        sum += std::lgamma(a);
        total += a;
    }
    return sum - std::lgamma(total);
}

double log_factorial(std::uint64_t n) {
    static const double table[] = {1., 1., 2., 6., 24., 120., 720., 5040., 40320., 362880.,
                                   3628800., 39916800., 479001600., 6227020800., 87178291200.,
                                   1307674368000., 20922789888000., 355687428096000.,
                                   6402373705728000., 121645100408832000., 2432902008176640000.};
    if (n <= 20) return std::log(table[n]);
    return std::lgamma(double(n) + 1.0);
}

double log_binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return -std::numeric_limits<double>::infinity();
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

namespace {

// Continued fraction for the incomplete beta function (Lentz's method).
double betacf(double a, double b, double x) {
    const double tiny = 1e-300;
    const int max_iter = 400;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 3e-16) return h;
    }
    throw numeric_error("betainc_reg: continued fraction did not converge");
}

}  // namespace

double betainc_reg(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw numeric_error("NonPositiveArgument: betainc_reg parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double log_sum_exp(std::span<const double> logs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : logs) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double v : logs) s += std::exp(v - m);
    return m + std::log(s);
}

}  // namespace ldp
