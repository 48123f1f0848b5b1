#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ldp/catalog.hpp"
#include "ldp/math.hpp"
#include "ldp/mc.hpp"
#include "ldp/metrics_population.hpp"
#include "ldp/verify.hpp"
#include "test_helpers.hpp"

using namespace ldp;

namespace {

McConfig cfg(std::uint64_t seed, std::size_t samples = 150'000) {
    McConfig c;
    c.seed = seed;
    c.samples = samples;
    return c;
}

}  // namespace

TEST_SUITE("catalog") {

TEST_CASE("grr construction") {
    const Protocol q = grr(2, 0.0);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) CHECK(q.entry(y, x) == doctest::Approx(0.5));
    CHECK(ldp_level(grr(4, 2.0)) == doctest::Approx(2.0).epsilon(1e-12));
    const Protocol half = grr(3, std::log(2.0));
    CHECK(half.entry(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(half.entry(1, 0) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("unary encoding structure") {
    // Column sums collapse by the binomial theorem.
    const Protocol q = unary_encoding(3, {0.7, 0.2});
    CHECK(q.output_size() == 8);
    for (int x = 0; x < 3; ++x) {
        double sum = 0.0;
        for (int y = 0; y < q.output_size(); ++y) sum += q.entry(y, x);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    // kappa=1, lambda=0 reports the singleton {x} deterministically.
    const Protocol sharp = unary_encoding(2, {1.0, 0.0});
    CHECK(sharp.output_size() == 2);  // unreachable subsets trimmed
    CHECK(sharp.is_deterministic());
    CHECK(std::isinf(ldp_level(sharp)));

    CHECK(throws_containing<validation_error>(
        [] { (void)unary_encoding(13, {0.7, 0.2}); }, "AlphabetTooLarge"));
    CHECK_THROWS_AS((void)unary_encoding(3, {0.2, 0.7}), validation_error);  // kappa < lambda
}

TEST_CASE("ue variants hit their nominal ldp level") {
    for (double eps : {0.5, 1.0, 2.0}) {
        CHECK(ldp_level(oue(3, eps)) == doctest::Approx(eps).epsilon(1e-12));
        CHECK(ldp_level(rappor_basic(3, eps)) == doctest::Approx(eps).epsilon(1e-12));
        CHECK(ldp_level(blh(3, eps)) == doctest::Approx(eps).epsilon(1e-12));
    }
    const UeParams o = oue_params(1.0);
    CHECK(o.kappa == doctest::Approx(0.5));
    CHECK(o.lambda == doctest::Approx(1.0 / (std::numbers::e + 1.0)).epsilon(1e-14));
    const UeParams r = rappor_params(2.0);
    CHECK(r.kappa == doctest::Approx(std::numbers::e / (std::numbers::e + 1.0)).epsilon(1e-14));
}

TEST_CASE("local hash") {
    const Protocol lh22 = local_hash(2, 2, 1.0);
    CHECK(lh22.output_size() == 8);  // 4 hash functions x 2 reports
    CHECK(ldp_level(local_hash(3, 2, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(throws_containing<validation_error>(
        [] { (void)local_hash(8, 6, 1.0, 1000); }, "OutputSpaceTooLarge"));
}

TEST_CASE("local hash privacy splits into hashing and grr parts") {
    // S_mu(LH) = E_h[S_mu(h) + (H(h(X)|P)/H(X|P)) S_{h**mu}(GRR^{g,eps})],
    // evaluated by sampling p and pushing it through each hash function.
    const int a = 3, g = 2;
    const double eps = 1.0;
    const DirichletPrior prior = jeffreys(a);
    const McConfig mc = cfg(17, 200'000);

    const MetricEstimate lhs = avg_privacy(local_hash(a, g, eps), prior, mc);

    const Protocol grr_g = grr(g, eps);
    std::vector<double> grr_col_h(g, 0.0);
    for (int x = 0; x < g; ++x)
        for (int y = 0; y < g; ++y) grr_col_h[x] -= xlogx(grr_g.entry(y, x));

    // One pass per hash function with the same sample stream.
    double rhs = 0.0;
    const int nhash = 8;  // g^a
    for (int hi = 0; hi < nhash; ++hi) {
        std::array<int, 3> h{};
        int rem = hi;
        for (int x = 0; x < a; ++x) {
            h[x] = rem % g;
            rem /= g;
        }
        auto stats = mc_prior_moments<4>(prior, mc, [&](std::span<const double> p, std::array<double, 4>& o) {
            std::array<double, 2> hp{0.0, 0.0};
            for (int x = 0; x < a; ++x) hp[h[x]] += p[x];
            const double h_hx = -xlogx(hp[0]) - xlogx(hp[1]);  // H(h(X)|P=p)
            double hy = 0.0, hyx = 0.0;
            for (int y = 0; y < g; ++y) {
                double s = 0.0;
                for (int x = 0; x < g; ++x) s += grr_g.entry(y, x) * hp[x];
                hy -= xlogx(s);
            }
            for (int x = 0; x < g; ++x) hyx += hp[x] * grr_col_h[x];
            o[0] = h_hx;                  // E -> H(h(X)|P)
            o[1] = entropy(p);            // E -> H(X|P)
            o[2] = hy - hyx;              // E -> leakage of GRR under h**mu
            o[3] = h_hx;                  // denominator of S_{h**mu}
        });
        const double s_h = 1.0 - stats.mean[0] / stats.mean[1];
        if (stats.mean[3] < 1e-12) {  // constant hash: the GRR stage sees a point mass
            rhs += s_h / nhash;
            continue;
        }
        const double s_grr_push = 1.0 - stats.mean[2] / stats.mean[3];
        rhs += (s_h + (stats.mean[0] / stats.mean[1]) * s_grr_push) / nhash;
    }
    CHECK(std::abs(lhs.value - rhs) < 3.0 * lhs.std_error + 2e-3);
}

TEST_CASE("deterministic protocols") {
    const Protocol par = parity(4);
    CHECK(par.entry(0, 1) == 1.0);  // value 2 reports "0"
    CHECK(par.output_labels()[0] == "0");
    CHECK(throws_containing<validation_error>([] { (void)parity(5); }, "OddAlphabet"));

    const Protocol id3 = identity(3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) CHECK(id3.entry(y, x) == (x == y ? 1.0 : 0.0));

    const Protocol det = deterministic({1, 1, 0}, 3);
    CHECK(det.is_deterministic());
    CHECK(det.output_size() == 2);  // output 2 unreachable, trimmed
}

TEST_CASE("grr closed forms: endpoints") {
    CHECK(grr_avg_privacy_closed(3, 0.0).value == 1.0);
    CHECK(grr_avg_privacy_closed(3, 30.0).value <= 1e-6);
    CHECK(grr_asymptotic_utility_closed(3, 0.0).value == -kInfinity);
    // eps -> infinity: U^as -> C_mu, so F -> 1.
    const double u30 = grr_asymptotic_utility_closed(3, 30.0).value;
    CHECK(std::abs(u30 - c_mu(jeffreys(3)).value) < 1e-4);
}

TEST_CASE("grr closed forms agree with the general estimators") {
    const MetricEstimate s_mc = avg_privacy(grr(4, 2.0), jeffreys(4), cfg(23));
    CHECK(std::abs(grr_avg_privacy_closed(4, 2.0).value - s_mc.value) < 3.0 * s_mc.std_error);
    const MetricEstimate u_mc = asymptotic_utility(grr(3, 1.0), jeffreys(3), cfg(24));
    CHECK(std::abs(grr_asymptotic_utility_closed(3, 1.0).value - u_mc.value) < 3.0 * u_mc.std_error);
}

TEST_CASE("grr mutual information closed form") {
    CHECK(grr_mutual_info_closed(2, 1.0, 0).value == 0.0);
    CHECK(std::abs(grr_mutual_info_closed(2, 0.0, 3).value) < 1e-9);
    for (int n : {1, 4}) {
        const double general = mutual_info_reports_vs_p(grr(2, 1.0), jeffreys(2), n).value;
        CHECK(std::abs(grr_mutual_info_closed(2, 1.0, n).value - general) < 1e-6);
    }
}

TEST_CASE("ue closed forms") {
    CHECK(ue_avg_privacy_closed(3, {0.4, 0.4}).value == 1.0);
    const UeParams o2 = oue_params(2.0);
    const MetricEstimate mc = avg_privacy(unary_encoding(3, o2), jeffreys(3), cfg(25));
    CHECK(std::abs(ue_avg_privacy_closed(3, o2).value - mc.value) < 3.0 * mc.std_error);
    // OUE keeps nontrivial privacy even at huge eps.
    const double s30 = ue_avg_privacy_closed(3, oue_params(30.0)).value;
    CHECK(s30 > 0.2);
    CHECK(s30 < 0.8);
}

TEST_CASE("mutual information closed forms beyond a=2") {
    // Against the general Monte Carlo inner path at a = 3.
    EnumerationBudget mc;
    mc.inner = EnumerationBudget::Inner::monte_carlo;
    mc.mc.samples = 200'000;
    mc.mc.seed = 71;
    const MetricEstimate g_mc = mutual_info_reports_vs_p(grr(3, 1.0), jeffreys(3), 2, mc);
    CHECK(std::abs(grr_mutual_info_closed(3, 1.0, 2).value - g_mc.value) < 3.0 * g_mc.std_error);
    const MetricEstimate u_mc =
        mutual_info_reports_vs_p(unary_encoding(3, oue_params(1.0)), jeffreys(3), 2, mc);
    CHECK(std::abs(ue_mutual_info_closed(3, oue_params(1.0), 2).value - u_mc.value) <
          3.0 * u_mc.std_error);
}

TEST_CASE("ue mutual information closed form") {
    CHECK(ue_mutual_info_closed(2, oue_params(1.0), 0).value == 0.0);
    // kappa=1, lambda=0 is an invertible encoding: I equals the clean I(X;P).
    const double clean = mutual_info_reports_vs_p(identity(2), jeffreys(2), 1).value;
    CHECK(std::abs(ue_mutual_info_closed(2, {1.0, 0.0}, 1).value - clean) < 1e-9);
    for (int n : {1, 2}) {
        const double general =
            mutual_info_reports_vs_p(unary_encoding(2, oue_params(1.0)), jeffreys(2), n).value;
        CHECK(std::abs(ue_mutual_info_closed(2, oue_params(1.0), n).value - general) < 1e-6);
    }
}

TEST_CASE("catalog protocols are faithful for positive eps") {
    for (double eps : {0.5, 2.0}) {
        CHECK(analyze_structure(grr(3, eps)).faithful);
        CHECK(analyze_structure(oue(3, eps)).faithful);
        CHECK(analyze_structure(rappor_basic(3, eps)).faithful);
        CHECK(analyze_structure(blh(3, eps)).faithful);
    }
}

TEST_CASE("average privacy dominates worst-case privacy at eps=2") {
    // Average privacy exceeds worst-case privacy across alphabet sizes.
    const double swc = std::exp(-2.0);
    for (int a : {2, 4}) {
        CHECK(grr_avg_privacy_closed(a, 2.0).value > swc);
        CHECK(ue_avg_privacy_closed(a, oue_params(2.0)).value > swc);
        CHECK(ue_avg_privacy_closed(a, rappor_params(2.0)).value > swc);
        CHECK(ue_avg_privacy_closed(a, blh_params(2.0)).value > swc);
    }
}

}  // TEST_SUITE
