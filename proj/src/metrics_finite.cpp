#include "ldp/metrics_finite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ldp/math.hpp"
#include "ldp/mc.hpp"
#include "ldp/quadrature.hpp"

namespace ldp {

double count_compositions(int n, int k) {
    // C(n + k - 1, k - 1) in floating point; good enough for a budget guard.
    double v = 1.0;
    for (int i = 1; i < k; ++i) v *= double(n + i) / double(i);
    return v;
}

bool next_composition(std::vector<int>& s) {
    const int k = static_cast<int>(s.size());
    if (k <= 1) return false;
    const int tail = s[k - 1];
    for (int j = k - 2; j >= 0; --j) {
        if (s[j] > 0) {
            s[j] -= 1;
            s[j + 1] = tail + 1;
            if (j + 1 != k - 1) s[k - 1] = 0;
            return true;
        }
    }
    return false;
}

namespace {

std::vector<std::vector<int>> all_compositions(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> s(k, 0);
    s[0] = n;
    do {
        out.push_back(s);
    } while (next_composition(s));
    return out;
}

double log_multinomial(int n, const std::vector<int>& s) {
    double v = log_factorial(n);
    for (int si : s) v -= log_factorial(si);
    return v;
}

void check_budget(double states, const EnumerationBudget& budget, const char* what) {
    if (states > double(budget.max_states)) {
        std::ostringstream msg;
        msg << "BudgetExceeded: " << what << " needs ~" << states << " states (cap "
            << budget.max_states << ")";
        throw budget_error(msg.str());
    }
}

void check_n(int n, const EnumerationBudget& budget) {
    if (n < 0) throw validation_error("n must be nonnegative");
    if (n > budget.max_n) {
        std::ostringstream msg;
        msg << "BudgetExceeded: n = " << n << " exceeds the supported cap " << budget.max_n;
        throw budget_error(msg.str());
    }
}

// Permutation protocols: column x has a single unit entry at out_of[x].
bool permutation_map(const Protocol& q, std::vector<int>& out_of) {
    if (q.output_size() != q.input_size() || !q.is_deterministic()) return false;
    out_of.assign(q.input_size(), -1);
    for (int x = 0; x < q.input_size(); ++x)
        for (int y = 0; y < q.output_size(); ++y)
            if (q.entry(y, x) == 1.0) out_of[x] = y;
    return true;
}

// Exact I(S;P) for a permutation protocol under a Dirichlet prior:
// E[r] = B(alpha+t)/B(alpha) and E[r log r] has a digamma closed form.
MetricEstimate permutation_mutual_info(const Protocol& q, const DirichletPrior& prior, int n,
                                       const std::vector<int>& out_of) {
    const int a = q.input_size();
    double alpha0 = 0.0;
    for (double v : prior.alpha) alpha0 += v;
    const double log_b_alpha = log_multivariate_beta(prior.alpha);
    CompensatedSum total;
    auto states = all_compositions(n, a);
    std::vector<double> shifted(a);
    for (const auto& s : states) {
        // tally over inputs: t_x = s_{out_of[x]}
        double logc = log_factorial(n);
        double t0 = alpha0 + n;
        for (int x = 0; x < a; ++x) {
            shifted[x] = prior.alpha[x] + s[out_of[x]];
            logc -= log_factorial(s[out_of[x]]);
        }
        const double log_er = log_multivariate_beta(shifted) - log_b_alpha;
        const double er = std::exp(log_er);
        double erlr = 0.0;
        for (int x = 0; x < a; ++x)
            erlr += s[out_of[x]] * (digamma(shifted[x]) - digamma(t0));
        erlr *= er;
        total.add(std::exp(logc) * (erlr - er * log_er));
    }
    return MetricEstimate::exact(total.value());
}

// Quadrature inner path for a = 2: expectations over p1 ~ Beta(alpha_1, alpha_2).
MetricEstimate quadrature_mutual_info(const Protocol& q, const DirichletPrior& prior, int n,
                                      const EnumerationBudget& budget) {
    const int b = q.output_size();
    QuadratureOptions opts;
    opts.tolerance = budget.quad_tol;
    CompensatedSum total;
    auto states = all_compositions(n, b);
    for (const auto& s : states) {
        auto log_r = [&](double t) {
            double lr = 0.0;
            for (int y = 0; y < b; ++y) {
                if (s[y] == 0) continue;
                const double qy = q.entry(y, 0) * t + q.entry(y, 1) * (1.0 - t);
                lr += qy > 0.0 ? s[y] * std::log(qy) : -kInfinity;
            }
            return lr;
        };
        const double er = beta_expectation(prior.alpha[0], prior.alpha[1],
                                           [&](double t) { return std::exp(log_r(t)); }, opts);
        const double erlr = beta_expectation(prior.alpha[0], prior.alpha[1],
                                             [&](double t) {
                                                 const double lr = log_r(t);
                                                 return std::isfinite(lr) ? std::exp(lr) * lr : 0.0;
                                             },
                                             opts);
        if (er <= 0.0) continue;
        total.add(std::exp(log_multinomial(n, s)) * (erlr - er * std::log(er)));
    }
    return MetricEstimate::quad(total.value());
}

// Monte Carlo inner path (a >= 3).  Two passes over the same sample stream:
// first the per-state means, then the influence function for the standard
// error of the nonlinear combination.
MetricEstimate mc_mutual_info(const Protocol& q, const DirichletPrior& prior, int n,
                              const EnumerationBudget& budget) {
    const int b = q.output_size();
    const auto states = all_compositions(n, b);
    const std::size_t ns = states.size();
    const McConfig& cfg = budget.mc;

    auto for_samples = [&](auto&& body) {
        const std::size_t nblocks = (cfg.samples + cfg.batch_size - 1) / cfg.batch_size;
        for_each_block(cfg.samples, cfg.batch_size, cfg.workers, [&](std::size_t bi, std::size_t count) {
            Xoshiro256pp rng(subseed(cfg.seed, bi));
            std::vector<double> p(q.input_size()), logq(b);
            for (std::size_t i = 0; i < count; ++i) {
                rng.next_dirichlet(prior.alpha, p);
                for (int y = 0; y < b; ++y) {
                    double s = 0.0;
                    for (int x = 0; x < q.input_size(); ++x) s += q.entry(y, x) * p[x];
                    logq[y] = s > 0.0 ? std::log(s) : -kInfinity;
                }
                body(bi, logq);
            }
        });
        (void)nblocks;
    };

    const std::size_t nblocks = (cfg.samples + cfg.batch_size - 1) / cfg.batch_size;
    std::vector<std::vector<double>> block_er(nblocks, std::vector<double>(ns, 0.0));
    std::vector<std::vector<double>> block_erlr(nblocks, std::vector<double>(ns, 0.0));
    for_samples([&](std::size_t bi, const std::vector<double>& logq) {
        for (std::size_t si = 0; si < ns; ++si) {
            double lr = 0.0;
            for (int y = 0; y < b; ++y)
                if (states[si][y]) lr += states[si][y] * logq[y];
            const double r = std::exp(lr);
            if (r > 0.0) {
                block_er[bi][si] += r;
                block_erlr[bi][si] += r * lr;
            }
        }
    });
    std::vector<double> er(ns), erlr(ns);
    for (std::size_t si = 0; si < ns; ++si) {
        CompensatedSum se, sel;
        for (std::size_t bi = 0; bi < nblocks; ++bi) {
            se.add(block_er[bi][si]);
            sel.add(block_erlr[bi][si]);
        }
        er[si] = se.value() / double(cfg.samples);
        erlr[si] = sel.value() / double(cfg.samples);
    }

    CompensatedSum total;
    std::vector<double> coef(ns), logmean(ns);
    for (std::size_t si = 0; si < ns; ++si) {
        coef[si] = std::exp(log_multinomial(n, states[si]));
        if (er[si] > 0.0) {
            logmean[si] = std::log(er[si]);
            total.add(coef[si] * (erlr[si] - er[si] * logmean[si]));
        } else {
            logmean[si] = 0.0;  // state never observed; its mass is negligible
        }
    }

    // Influence pass: phi_i = sum_s C_s [(r log r - Erlr) - (log Er + 1)(r - Er)].
    std::vector<double> block_phi(nblocks, 0.0), block_phi2(nblocks, 0.0);
    for_samples([&](std::size_t bi, const std::vector<double>& logq) {
        double phi = 0.0;
        for (std::size_t si = 0; si < ns; ++si) {
            if (er[si] <= 0.0) continue;
            double lr = 0.0;
            for (int y = 0; y < b; ++y)
                if (states[si][y]) lr += states[si][y] * logq[y];
            const double r = std::exp(lr);
            const double rlr = r > 0.0 ? r * lr : 0.0;
            phi += coef[si] * ((rlr - erlr[si]) - (logmean[si] + 1.0) * (r - er[si]));
        }
        block_phi[bi] += phi;
        block_phi2[bi] += phi * phi;
    });
    CompensatedSum sphi, sphi2;
    for (std::size_t bi = 0; bi < nblocks; ++bi) {
        sphi.add(block_phi[bi]);
        sphi2.add(block_phi2[bi]);
    }
    const double nd = double(cfg.samples);
    const double mean_phi = sphi.value() / nd;
    double var = (sphi2.value() / nd - mean_phi * mean_phi) / (nd - 1.0);
    if (var < 0.0) var = 0.0;
    return MetricEstimate::mc(total.value(), std::sqrt(var), cfg.samples, cfg.seed);
}

}  // namespace

MetricEstimate mutual_info_reports_vs_p(const Protocol& q, const DirichletPrior& prior, int n,
                                        const EnumerationBudget& budget) {
    if (prior.size() != q.input_size())
        throw validation_error("mutual_info_reports_vs_p: prior dimension mismatch");
    check_n(n, budget);
    if (n == 0) return MetricEstimate::exact(0.0);
    check_budget(count_compositions(n, q.output_size()), budget, "I(Y;P) tally enumeration");

    std::vector<int> out_of;
    if (permutation_map(q, out_of)) return permutation_mutual_info(q, prior, n, out_of);
    const bool quad = budget.inner == EnumerationBudget::Inner::quadrature ||
                      (budget.inner == EnumerationBudget::Inner::automatic && q.input_size() == 2);
    if (quad) {
        if (q.input_size() != 2)
            throw validation_error("quadrature inner path requires a = 2");
        return quadrature_mutual_info(q, prior, n, budget);
    }
    return mc_mutual_info(q, prior, n, budget);
}

MetricEstimate entropy_tallies(const DirichletPrior& prior, int n, int a,
                               const EnumerationBudget& budget) {
    if (prior.size() != a) throw validation_error("entropy_tallies: prior dimension mismatch");
    check_n(n, budget);
    if (n == 0) return MetricEstimate::exact(0.0);
    check_budget(count_compositions(n, a), budget, "H(T) tally enumeration");
    const double log_b_alpha = log_multivariate_beta(prior.alpha);
    std::vector<double> shifted(a);
    CompensatedSum h;
    std::vector<int> t(a, 0);
    t[0] = n;
    do {
        for (int x = 0; x < a; ++x) shifted[x] = prior.alpha[x] + t[x];
        const double logp = log_multinomial(n, t) + log_multivariate_beta(shifted) - log_b_alpha;
        h.add(-std::exp(logp) * logp);
    } while (next_composition(t));
    return MetricEstimate::exact(h.value());
}

MetricEstimate mutual_info_reports_vs_tallies(const Protocol& q, const DirichletPrior& prior, int n,
                                              const EnumerationBudget& budget) {
    if (prior.size() != q.input_size())
        throw validation_error("mutual_info_reports_vs_tallies: prior dimension mismatch");
    check_n(n, budget);
    if (n == 0) return MetricEstimate::exact(0.0);
    const int a = q.input_size();
    const int b = q.output_size();
    check_budget(count_compositions(n, a * b), budget, "I(S;T) contingency enumeration");

    // Ranks for the margin vectors.
    auto s_states = all_compositions(n, b);
    auto t_states = all_compositions(n, a);
    std::map<std::vector<int>, int> s_rank, t_rank;
    for (std::size_t i = 0; i < s_states.size(); ++i) s_rank[s_states[i]] = int(i);
    for (std::size_t i = 0; i < t_states.size(); ++i) t_rank[t_states[i]] = int(i);
    check_budget(double(s_states.size()) * double(t_states.size()), budget, "I(S;T) joint table");

    std::vector<double> joint(s_states.size() * t_states.size(), 0.0);
    std::vector<int> cells(std::size_t(a) * b, 0);  // M_{y,x} flattened row-major
    cells[0] = n;
    std::vector<int> srow(b), tcol(a);
    do {
        double logw = log_factorial(n);
        bool feasible = true;
        std::fill(srow.begin(), srow.end(), 0);
        std::fill(tcol.begin(), tcol.end(), 0);
        for (int y = 0; y < b && feasible; ++y)
            for (int x = 0; x < a; ++x) {
                const int m = cells[std::size_t(y) * a + x];
                if (m == 0) continue;
                const double qyx = q.entry(y, x);
                if (qyx <= 0.0) {
                    feasible = false;
                    break;
                }
                logw += m * std::log(qyx) - log_factorial(m);
                srow[y] += m;
                tcol[x] += m;
            }
        if (feasible)
            joint[std::size_t(s_rank[srow]) * t_states.size() + t_rank[tcol]] += std::exp(logw);
    } while (next_composition(cells));

    // Multiply in E[prod p^t] = B(alpha+t)/B(alpha).
    const double log_b_alpha = log_multivariate_beta(prior.alpha);
    std::vector<double> shifted(a);
    std::vector<double> t_weight(t_states.size());
    for (std::size_t ti = 0; ti < t_states.size(); ++ti) {
        for (int x = 0; x < a; ++x) shifted[x] = prior.alpha[x] + t_states[ti][x];
        t_weight[ti] = std::exp(log_multivariate_beta(shifted) - log_b_alpha);
    }
    for (std::size_t si = 0; si < s_states.size(); ++si)
        for (std::size_t ti = 0; ti < t_states.size(); ++ti)
            joint[si * t_states.size() + ti] *= t_weight[ti];

    std::vector<double> ps(s_states.size(), 0.0), pt(t_states.size(), 0.0);
    for (std::size_t si = 0; si < s_states.size(); ++si)
        for (std::size_t ti = 0; ti < t_states.size(); ++ti) {
            ps[si] += joint[si * t_states.size() + ti];
            pt[ti] += joint[si * t_states.size() + ti];
        }
    CompensatedSum mi;
    for (std::size_t si = 0; si < s_states.size(); ++si)
        for (std::size_t ti = 0; ti < t_states.size(); ++ti) {
            const double j = joint[si * t_states.size() + ti];
            if (j > 0.0) mi.add(j * std::log(j / (ps[si] * pt[ti])));
        }
    return MetricEstimate::exact(mi.value());
}

namespace {

Protocol identity_protocol(int a) {
    std::vector<std::vector<double>> rows(a, std::vector<double>(a, 0.0));
    for (int i = 0; i < a; ++i) rows[i][i] = 1.0;
    return build_protocol(std::move(rows));
}

MetricEstimate ratio_estimate(const MetricEstimate& num, const MetricEstimate& den,
                              const char* degenerate_msg) {
    if (std::abs(den.value) < 1e-12) throw metric_error(degenerate_msg);
    const double v = num.value / den.value;
    const double se = std::hypot(num.std_error / den.value,
                                 num.value * den.std_error / (den.value * den.value));
    MetricEstimate out;
    out.value = v;
    out.std_error = se;
    out.sample_count = std::max(num.sample_count, den.sample_count);
    out.seed = num.sample_count ? num.seed : den.seed;
    out.method = (num.method == Method::monte_carlo || den.method == Method::monte_carlo)
                     ? Method::monte_carlo
                     : (num.method == Method::quadrature || den.method == Method::quadrature
                            ? Method::quadrature
                            : Method::exact);
    return out;
}

}  // namespace

MetricEstimate distribution_utility(const Protocol& q, const DirichletPrior& prior, int n,
                                    const EnumerationBudget& budget) {
    const MetricEstimate num = mutual_info_reports_vs_p(q, prior, n, budget);
    const MetricEstimate den =
        mutual_info_reports_vs_p(identity_protocol(q.input_size()), prior, n, budget);
    return ratio_estimate(num, den, "DegeneratePrior: I(X;P) is numerically zero");
}

MetricEstimate tally_utility(const Protocol& q, const DirichletPrior& prior, int n,
                             const EnumerationBudget& budget) {
    const MetricEstimate num = mutual_info_reports_vs_tallies(q, prior, n, budget);
    const MetricEstimate den = entropy_tallies(prior, n, q.input_size(), budget);
    return ratio_estimate(num, den, "DegeneratePrior: H(T) is numerically zero");
}

MetricEstimate digit_utility(const Protocol& q, const DirichletPrior& prior, int n,
                             const EnumerationBudget& budget) {
    if (!analyze_structure(q).faithful)
        throw metric_error("NotFaithful: digit utility requires rank(Q) = a");
    const MetricEstimate mi = mutual_info_reports_vs_p(q, prior, n, budget);
    const double h = prior_differential_entropy(prior);
    MetricEstimate out = mi;
    out.value = (mi.value - h) / (q.input_size() - 1);
    out.std_error = mi.std_error / (q.input_size() - 1);
    return out;
}

MetricEstimate finite_avg_privacy(const Protocol& q, const DirichletPrior& prior, int n,
                                  const EnumerationBudget& budget) {
    if (q.input_size() != 2)
        throw validation_error("finite_avg_privacy: quadrature path requires a = 2");
    check_n(n, budget);
    if (n == 0) throw validation_error("finite_avg_privacy: n must be >= 1");
    const int b = q.output_size();
    check_budget(count_compositions(n, b) + count_compositions(n, 2), budget, "finite S_mu");
    QuadratureOptions opts;
    opts.tolerance = budget.quad_tol;

    auto s_states = all_compositions(n, b);
    auto t_states = all_compositions(n, 2);
    std::vector<double> col_h(2, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < b; ++y) col_h[x] -= xlogx(q.entry(y, x));

    // All three terms are enumerated at this n; only the prior expectation is
    // delegated to quadrature.
    auto h_reports_given_p = [&](double t) {  // H(Yvec | P = p)
        double h = 0.0;
        for (const auto& s : s_states) {
            double lr = 0.0;
            for (int y = 0; y < b; ++y) {
                if (!s[y]) continue;
                const double qy = q.entry(y, 0) * t + q.entry(y, 1) * (1.0 - t);
                lr += qy > 0.0 ? s[y] * std::log(qy) : -kInfinity;
            }
            if (std::isfinite(lr)) h -= std::exp(log_multinomial(n, s) + lr) * lr;
        }
        return h;
    };
    auto h_reports_given_secrets = [&](double t) {  // H(Yvec | Xvec, P = p)
        double h = 0.0;
        for (const auto& tv : t_states) {
            const double lp = (tv[0] ? tv[0] * std::log(t) : 0.0) +
                              (tv[1] ? tv[1] * std::log(1.0 - t) : 0.0);
            h += std::exp(log_multinomial(n, tv) + lp) * (tv[0] * col_h[0] + tv[1] * col_h[1]);
        }
        return h;
    };
    auto h_secrets_given_p = [&](double t) {  // H(Xvec | P = p)
        double h = 0.0;
        for (const auto& tv : t_states) {
            const double lp = (tv[0] ? tv[0] * std::log(t) : 0.0) +
                              (tv[1] ? tv[1] * std::log(1.0 - t) : 0.0);
            if (std::isfinite(lp)) h -= std::exp(log_multinomial(n, tv) + lp) * lp;
        }
        return h;
    };

    const double leak = beta_expectation(prior.alpha[0], prior.alpha[1], h_reports_given_p, opts) -
                        beta_expectation(prior.alpha[0], prior.alpha[1], h_reports_given_secrets, opts);
    const double hx = beta_expectation(prior.alpha[0], prior.alpha[1], h_secrets_given_p, opts);
    if (hx < 1e-9) throw metric_error("DegeneratePrior: H(Xvec|P) is numerically zero");
    return MetricEstimate::quad(1.0 - leak / hx);
}

}  // namespace ldp
