#include "ldp/catalog.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "ldp/math.hpp"
#include "ldp/quadrature.hpp"

namespace ldp {

namespace {

const double kHalfLog2PiE = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);

double binomial(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v *= double(n - k + i) / double(i);
    return v;
}

double binary_entropy(double p) { return -xlogx(p) - xlogx(1.0 - p); }

void check_ue_params(const UeParams& params) {
    if (!(params.kappa >= 0.0 && params.kappa <= 1.0 && params.lambda >= 0.0 && params.lambda <= 1.0))
        throw validation_error("UeParams: kappa and lambda must lie in [0, 1]");
    if (params.kappa < params.lambda)
        throw validation_error("UeParams: kappa must be >= lambda");
    if (!(params.kappa * (1.0 - params.lambda) > 0.0))
        throw validation_error("UeParams: kappa (1 - lambda) must be positive");
}

std::string subset_label(int mask, int a) {
    std::string s = "{";
    bool first = true;
    for (int x = 0; x < a; ++x)
        if (mask >> x & 1) {
            if (!first) s += ',';
            s += std::to_string(x + 1);
            first = false;
        }
    return s + "}";
}

}  // namespace

Protocol grr(int a, double epsilon) {
    if (a < 2) throw validation_error("grr: need a >= 2");
    if (!(epsilon >= 0.0)) throw validation_error("grr: need epsilon >= 0");
    const double beta = std::expm1(epsilon);
    const double keep = (1.0 + beta) / (a + beta);
    const double flip = 1.0 / (a + beta);
    std::vector<std::vector<double>> rows(a, std::vector<double>(a, flip));
    for (int i = 0; i < a; ++i) rows[i][i] = keep;
    return build_protocol(std::move(rows));
}

Protocol unary_encoding(int a, const UeParams& params) {
    if (a < 2) throw validation_error("unary_encoding: need a >= 2");
    if (a > 12) throw validation_error("AlphabetTooLarge: unary encoding caps a at 12 (b = 2^a)");
    check_ue_params(params);
    const double k = params.kappa, l = params.lambda;
    const int b = 1 << a;
    std::vector<std::vector<double>> rows(b, std::vector<double>(a));
    std::vector<std::string> labels_out(b);
    for (int y = 0; y < b; ++y) {
        const int size = std::popcount(unsigned(y));
        labels_out[y] = subset_label(y, a);
        for (int x = 0; x < a; ++x) {
            const int inx = y >> x & 1;
            rows[y][x] = (inx ? k : 1.0 - k) * std::pow(l, size - inx) *
                         std::pow(1.0 - l, a - size - (1 - inx));
        }
    }
    return build_protocol(std::move(rows), {}, std::move(labels_out));
}

UeParams rappor_params(double epsilon) {
    if (!(epsilon > 0.0)) throw validation_error("rappor_basic: need epsilon > 0");
    const double e = std::exp(epsilon / 2.0);
    return {e / (e + 1.0), 1.0 / (e + 1.0)};
}

UeParams oue_params(double epsilon) {
    if (!(epsilon > 0.0)) throw validation_error("oue: need epsilon > 0");
    return {0.5, 1.0 / (std::exp(epsilon) + 1.0)};
}

UeParams blh_params(double epsilon) {
    if (!(epsilon > 0.0)) throw validation_error("blh: need epsilon > 0");
    const double e = std::exp(epsilon);
    return {e / (e + 1.0), 0.5};
}

Protocol rappor_basic(int a, double epsilon) { return unary_encoding(a, rappor_params(epsilon)); }
Protocol oue(int a, double epsilon) { return unary_encoding(a, oue_params(epsilon)); }
Protocol blh(int a, double epsilon) { return unary_encoding(a, blh_params(epsilon)); }

Protocol local_hash(int a, int g, double epsilon, std::size_t output_cap) {
    if (a < 2) throw validation_error("local_hash: need a >= 2");
    if (g < 1 || g > a) throw validation_error("local_hash: need 1 <= g <= a");
    if (!(epsilon > 0.0)) throw validation_error("local_hash: need epsilon > 0");
    double hash_count = std::pow(double(g), double(a));
    if (hash_count * g > double(output_cap)) {
        std::ostringstream msg;
        msg << "OutputSpaceTooLarge: local hash needs " << hash_count * g << " outputs (cap "
            << output_cap << ")";
        throw validation_error(msg.str());
    }
    const std::size_t nhash = std::size_t(hash_count);
    const double beta = std::expm1(epsilon);
    const double keep = (1.0 + beta) / (g + beta);
    const double flip = 1.0 / (g + beta);
    const double w = 1.0 / double(nhash);
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels_out;
    rows.reserve(nhash * g);
    std::vector<int> h(a);
    for (std::size_t hi = 0; hi < nhash; ++hi) {
        std::size_t rem = hi;
        for (int x = 0; x < a; ++x) {
            h[x] = int(rem % g);
            rem /= g;
        }
        for (int y = 0; y < g; ++y) {
            std::vector<double> row(a);
            for (int x = 0; x < a; ++x) row[x] = w * (h[x] == y ? keep : flip);
            rows.push_back(std::move(row));
            labels_out.push_back("h" + std::to_string(hi) + ":" + std::to_string(y + 1));
        }
    }
    return build_protocol(std::move(rows), {}, std::move(labels_out));
}

Protocol parity(int a) {
    if (a < 2 || a % 2 != 0) throw validation_error("OddAlphabet: parity needs an even alphabet");
    std::vector<std::vector<double>> rows(2, std::vector<double>(a, 0.0));
    for (int x = 0; x < a; ++x) rows[(x + 1) % 2][x] = 1.0;  // input value x+1 reports (x+1) mod 2
    return build_protocol(std::move(rows), {}, {"0", "1"});
}

Protocol identity(int a) {
    if (a < 2) throw validation_error("identity: need a >= 2");
    std::vector<std::vector<double>> rows(a, std::vector<double>(a, 0.0));
    for (int i = 0; i < a; ++i) rows[i][i] = 1.0;
    return build_protocol(std::move(rows));
}

Protocol deterministic(const std::vector<int>& targets, int num_outputs) {
    const int a = static_cast<int>(targets.size());
    if (a < 2) throw validation_error("deterministic: need a >= 2");
    std::vector<std::vector<double>> rows(num_outputs, std::vector<double>(a, 0.0));
    for (int x = 0; x < a; ++x) {
        if (targets[x] < 0 || targets[x] >= num_outputs)
            throw validation_error("deterministic: target out of range");
        rows[targets[x]][x] = 1.0;
    }
    // Unreachable outputs are trimmed by construction.
    return build_protocol(std::move(rows));
}

MetricEstimate grr_avg_privacy_closed(int a, double epsilon) {
    if (a < 2) throw validation_error("grr_avg_privacy_closed: need a >= 2");
    if (epsilon == 0.0) return MetricEstimate::exact(1.0);
    const double beta = std::expm1(epsilon);
    const double hx = digamma((a + 2.0) / 2.0) - digamma(1.5);
    const double e = beta_expectation(0.5, (a - 1.0) / 2.0, [&](double t) {
        const double v = 1.0 + beta * t;
        return v * std::log(v);
    });
    const double value = 1.0 - (epsilon * std::exp(epsilon) - a * e) / ((a + beta) * hx);
    return MetricEstimate::quad(value);
}

MetricEstimate grr_asymptotic_utility_closed(int a, double epsilon) {
    if (a < 2) throw validation_error("grr_asymptotic_utility_closed: need a >= 2");
    if (epsilon == 0.0) return MetricEstimate::exact(-kInfinity);  // log(beta) term
    const double beta = std::expm1(epsilon);
    const double e = beta_expectation(0.5, (a - 1.0) / 2.0,
                                      [&](double t) { return std::log1p(beta * t); });
    const double value = -kHalfLog2PiE + std::log(beta) -
                         (a - 2.0) / (2.0 * a - 2.0) * std::log(a + beta) -
                         a / (2.0 * a - 2.0) * e;
    return MetricEstimate::quad(value);
}

MetricEstimate grr_mutual_info_closed(int a, double epsilon, int n, const EnumerationBudget& budget) {
    if (a < 2) throw validation_error("grr_mutual_info_closed: need a >= 2");
    if (n == 0) return MetricEstimate::exact(0.0);
    if (n > budget.max_n) throw budget_error("BudgetExceeded: n exceeds the supported cap");
    if (count_compositions(n, 2 * a) > double(budget.max_states))
        throw budget_error("BudgetExceeded: GRR closed-form k-lattice too large");

    const double beta = std::expm1(epsilon);
    const double log_beta = beta > 0.0 ? std::log(beta) : -kInfinity;
    const double log_ab = std::log(a + beta);
    const std::vector<double> alpha(a, 0.5);
    const double log_b_alpha = log_multivariate_beta(alpha);

    // Entropy rate term: G(beta) = a E[((1+beta L)/(a+beta)) log((1+beta L)/(a+beta))].
    const double g = a * beta_expectation(0.5, (a - 1.0) / 2.0, [&](double t) {
        const double v = (1.0 + beta * t) / (a + beta);
        return v * std::log(v);
    });

    CompensatedSum sum_f;
    std::vector<int> s(a, 0);
    s[0] = n;
    std::vector<int> k(a);
    std::vector<double> shifted(a);
    do {
        // F_n(beta, s) = sum_{k <= s} beta^{|k|}/(a+beta)^n prod C(s_y,k_y) B(alpha+k)/B(alpha)
        CompensatedSum f;
        std::fill(k.begin(), k.end(), 0);
        for (;;) {
            int ksum = 0;
            double log_term = -double(n) * log_ab - log_b_alpha;
            for (int y = 0; y < a; ++y) {
                ksum += k[y];
                log_term += log_binomial(s[y], k[y]);
                shifted[y] = alpha[y] + k[y];
            }
            log_term += log_multivariate_beta(shifted);
            log_term += ksum > 0 ? ksum * log_beta : 0.0;
            if (ksum == 0 || beta > 0.0) f.add(std::exp(log_term));
            int pos = 0;
            while (pos < a && k[pos] == s[pos]) k[pos++] = 0;
            if (pos == a) break;
            ++k[pos];
        }
        const double fv = f.value();
        double logc = log_factorial(n);
        for (int y = 0; y < a; ++y) logc -= log_factorial(s[y]);
        sum_f.add(std::exp(logc) * fv * std::log(fv));
    } while (next_composition(s));

    return MetricEstimate::quad(n * g - sum_f.value());
}

namespace {

// E[R_g log R_g] terms of the UE privacy formula; B_0 = 0 and B_a = 1 are
// the constant endpoint cases with the canceling factors written out.
double ue_rg_term(int a, double kappa, double lambda, int g) {
    if (g == 0) return xlogx((1.0 - kappa) * std::pow(1.0 - lambda, a - 1));
    if (g == a) return xlogx(kappa * std::pow(lambda, a - 1));
    const double scale = std::pow(lambda, g - 1) * std::pow(1.0 - lambda, a - g - 1);
    if (scale <= 0.0) return 0.0;
    return beta_expectation(g / 2.0, (a - g) / 2.0, [&](double t) {
        return xlogx(scale * (lambda * (1.0 - kappa) + (kappa - lambda) * t));
    });
}

}  // namespace

MetricEstimate ue_avg_privacy_closed(int a, const UeParams& params) {
    if (a < 2) throw validation_error("ue_avg_privacy_closed: need a >= 2");
    check_ue_params(params);
    const double k = params.kappa, l = params.lambda;
    if (k == l) return MetricEstimate::exact(1.0);  // output independent of input
    const double hx = digamma((a + 2.0) / 2.0) - digamma(1.5);
    double sum = 0.0;
    for (int g = 0; g <= a; ++g) sum += binomial(a, g) * ue_rg_term(a, k, l, g);
    const double leak = -(a - 1.0) * binary_entropy(l) - binary_entropy(k) - sum;
    return MetricEstimate::quad(1.0 - leak / hx);
}

MetricEstimate ue_mutual_info_closed(int a, const UeParams& params, int n,
                                     const EnumerationBudget& budget) {
    if (a < 2 || a > 12) throw validation_error("ue_mutual_info_closed: need 2 <= a <= 12");
    check_ue_params(params);
    if (n == 0) return MetricEstimate::exact(0.0);
    if (n > budget.max_n) throw budget_error("BudgetExceeded: n exceeds the supported cap");
    const double k = params.kappa, l = params.lambda;
    if (k == l) return MetricEstimate::exact(0.0);  // uniform output
    const int b = 1 << a;
    if (count_compositions(n, b) > double(budget.max_states))
        throw budget_error("BudgetExceeded: UE closed-form tally enumeration");

    const std::vector<double> alpha(a, 0.5);
    const double log_b_alpha = log_multivariate_beta(alpha);
    std::vector<int> set_bits(b, 0);
    for (int y = 0; y < b; ++y) set_bits[y] = std::popcount(unsigned(y));

    // H(Y|P) rate.
    double rate = 0.0;
    for (int g = 0; g <= a; ++g) rate += binomial(a, g) * ue_rg_term(a, k, l, g);

    std::size_t visited = 0;
    auto charge = [&](std::size_t cost) {
        visited += cost;
        if (visited > budget.max_states)
            throw budget_error("BudgetExceeded: UE closed-form (s,k,m) lattice too large");
    };

    std::vector<double> t_shift(a);
    CompensatedSum sum_f;
    std::vector<int> s(b, 0);
    s[0] = n;
    do {
        // F(s) = sum over k <= s (k_y = 0 where y = {}) and m^y lattices.
        CompensatedSum f;
        int s_dot_size = 0;
        for (int y = 0; y < b; ++y) s_dot_size += s[y] * set_bits[y];

        std::vector<int> kv(b, 0);
        for (;;) {
            charge(1);
            bool feasible = kv[0] == 0;  // empty set cannot carry k mass
            int ksum = 0;
            double log_coef = 0.0;
            if (feasible)
                for (int y = 1; y < b; ++y) {
                    ksum += kv[y];
                    log_coef += log_binomial(s[y], kv[y]);
                }
            if (feasible) {
                // prefactor independent of the m-lattice
                const double lam_exp = double(s_dot_size - ksum);
                const double oneml_exp = double(n) * (a - 1.0) - double(s_dot_size);
                double log_pref = log_coef;
                bool zero = false;
                if (l > 0.0)
                    log_pref += lam_exp * std::log(l);
                else if (lam_exp > 0.0)
                    zero = true;
                if (l < 1.0)
                    log_pref += oneml_exp * std::log(1.0 - l);
                log_pref += ksum * std::log(k - l);
                if (k < 1.0)
                    log_pref += double(n - ksum) * std::log(1.0 - k);
                else if (n - ksum > 0)
                    zero = true;

                if (!zero) {
                    // Sum over (m^y): for each y with k_y > 0, distribute k_y over the
                    // members of y; accumulate the input tally t = sum_y m^y.
                    std::vector<int> tally(a, 0);
                    double m_sum = 0.0;
                    CompensatedSum msum_acc;
                    std::function<void(int, double)> recurse = [&](int y, double log_mult) {
                        while (y < b && kv[y] == 0) ++y;
                        if (y == b) {
                            charge(1);
                            for (int x = 0; x < a; ++x) t_shift[x] = alpha[x] + tally[x];
                            msum_acc.add(std::exp(log_mult + log_multivariate_beta(t_shift) - log_b_alpha));
                            return;
                        }
                        // compositions of kv[y] over the set bits of y
                        std::vector<int> members;
                        for (int x = 0; x < a; ++x)
                            if (y >> x & 1) members.push_back(x);
                        std::vector<int> m(members.size(), 0);
                        m[0] = kv[y];
                        do {
                            double lm = log_factorial(kv[y]);
                            for (std::size_t j = 0; j < members.size(); ++j) {
                                lm -= log_factorial(m[j]);
                                tally[members[j]] += m[j];
                            }
                            recurse(y + 1, log_mult + lm);
                            for (std::size_t j = 0; j < members.size(); ++j)
                                tally[members[j]] -= m[j];
                        } while (next_composition(m));
                    };
                    recurse(1, 0.0);
                    m_sum = msum_acc.value();
                    f.add(std::exp(log_pref) * m_sum);
                }
            }
            int pos = 0;
            while (pos < b && kv[pos] == s[pos]) kv[pos++] = 0;
            if (pos == b) break;
            ++kv[pos];
        }
        const double fv = f.value();
        if (fv > 0.0) {
            double logc = log_factorial(n);
            for (int y = 0; y < b; ++y) logc -= log_factorial(s[y]);
            sum_f.add(std::exp(logc) * fv * std::log(fv));
        }
    } while (next_composition(s));

    return MetricEstimate::quad(n * rate - sum_f.value());
}

}  // namespace ldp
