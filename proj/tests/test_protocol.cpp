#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ldp/catalog.hpp"
#include "ldp/prior.hpp"
#include "ldp/protocol.hpp"
#include "ldp/verify.hpp"
#include "test_helpers.hpp"

using namespace ldp;

namespace {

bool matrices_close(const Protocol& a, const Protocol& b, double tol = 1e-12) {
    if (a.input_size() != b.input_size() || a.output_size() != b.output_size()) return false;
    for (int y = 0; y < a.output_size(); ++y)
        for (int x = 0; x < a.input_size(); ++x)
            if (std::abs(a.entry(y, x) - b.entry(y, x)) > tol) return false;
    return true;
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("build accepts the identity table") {
    const Protocol q = build_protocol({{1, 0}, {0, 1}});
    CHECK(q.input_size() == 2);
    CHECK(q.output_size() == 2);
    CHECK(q.is_deterministic());
}

TEST_CASE("build rejects bad tables") {
    CHECK(throws_containing<validation_error>(
        [] { build_protocol({{1.0, 0.49}, {0.0, 0.49}}); }, "ColumnSumMismatch"));
    CHECK(throws_containing<validation_error>(
        [] { build_protocol({{1.0, 0.49}, {0.0, 0.49}}); }, "column 1"));
    CHECK(throws_containing<validation_error>(
        [] { build_protocol({{1.0, -0.1}, {0.0, 1.1}}); }, "NegativeEntry"));
    CHECK_THROWS_AS((void)build_protocol({{1.0}, {0.0}}), validation_error);  // a = 1
}

TEST_CASE("grr table for a=3 at eps=log 2") {
    // Entry formula at beta = 1: diagonal 2/4, off-diagonal 1/4.
    const Protocol q = build_protocol({{0.5, 0.25, 0.25}, {0.25, 0.5, 0.25}, {0.25, 0.25, 0.5}});
    CHECK(matrices_close(q, grr(3, std::log(2.0))));
}

TEST_CASE("zero rows are trimmed and labels kept") {
    const Protocol q = build_protocol({{0.5, 0.5}, {0.0, 0.0}, {0.5, 0.5}}, {}, {"u", "v", "w"});
    CHECK(q.output_size() == 2);
    CHECK(q.output_labels() == std::vector<std::string>{"u", "w"});
}

TEST_CASE("ldp level") {
    CHECK(ldp_level(grr(4, 2.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::isinf(ldp_level(parity(4))));
    // UE level log(kappa(1-lambda)/(lambda(1-kappa))); OUE at eps=1 gives 1.
    const UeParams p = oue_params(1.0);
    const double expected = std::log(p.kappa * (1 - p.lambda) / (p.lambda * (1 - p.kappa)));
    CHECK(expected == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ldp_level(oue(3, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pushforward") {
    const SimplexPoint p = SimplexPoint::checked({0.3, 0.7});
    const auto out = pushforward(identity(2), p);
    CHECK(out[0] == doctest::Approx(0.3));
    CHECK(out[1] == doctest::Approx(0.7));

    const double eps = 1.3;
    const auto corner = pushforward(grr(2, eps), SimplexPoint::checked({1.0, 0.0}));
    CHECK(corner[0] == doctest::Approx(std::exp(eps) / (std::exp(eps) + 1)).epsilon(1e-12));
    CHECK(corner[1] == doctest::Approx(1 / (std::exp(eps) + 1)).epsilon(1e-12));

    const auto par = pushforward(parity(4), SimplexPoint::checked({0.25, 0.25, 0.25, 0.25}));
    CHECK(par[0] == doctest::Approx(0.5));  // even mass
    CHECK(par[1] == doctest::Approx(0.5));
}

TEST_CASE("identity composes neutrally") {
    const Protocol q = grr(3, 1.0);
    CHECK(matrices_close(compose(identity(3), q), q));
}

TEST_CASE("compose grr after parity explicit table") {
    // GRR(2,eps) after parity(4): a 2x4 table with entries {e^eps, 1}/(e^eps+1) by parity.
    const double eps = 0.8;
    const Protocol rq = compose(grr(2, eps), parity(4));
    const double hi = std::exp(eps) / (std::exp(eps) + 1.0);
    const double lo = 1.0 / (std::exp(eps) + 1.0);
    REQUIRE(rq.output_size() == 2);
    REQUIRE(rq.input_size() == 4);
    for (int x = 0; x < 4; ++x) {
        const int out = (x + 1) % 2;  // parity of the 1-based value
        CHECK(rq.entry(out, x) == doctest::Approx(hi).epsilon(1e-12));
        CHECK(rq.entry(1 - out, x) == doctest::Approx(lo).epsilon(1e-12));
    }
    CHECK(throws_containing<validation_error>(
        [] { (void)compose(grr(3, 1.0), parity(4)); }, "DimensionMismatch"));
}

TEST_CASE("postprocessing cannot raise the ldp level") {
    for (int i = 0; i < 25; ++i) {
        const Protocol q = random_protocol(3, 3, 100 + i);
        const Protocol r = random_protocol(3, 2, 200 + i);
        CHECK(ldp_level(compose(r, q)) <= ldp_level(q) + 1e-9);
        CHECK(worst_case_privacy(compose(r, q)) >= worst_case_privacy(q) - 1e-9);
    }
}

TEST_CASE("compose is associative") {
    for (int i = 0; i < 10; ++i) {
        const Protocol q = random_protocol(3, 4, 300 + i);
        const Protocol r = random_protocol(4, 3, 400 + i);
        const Protocol t = random_protocol(3, 2, 500 + i);
        CHECK(matrices_close(compose(t, compose(r, q)), compose(compose(t, r), q), 1e-12));
    }
}

TEST_CASE("product") {
    const Protocol q = grr(2, 0.7);
    CHECK(matrices_close(product(std::vector<Protocol>{q}), q));

    const Protocol two = product(std::vector<Protocol>{q, q});
    CHECK(two.output_size() == 4);
    CHECK(ldp_level(two) == doctest::Approx(1.4).epsilon(1e-9));

    const Protocol r = random_protocol(2, 3, 17);
    CHECK(product(std::vector<Protocol>{q, r}).output_size() == 2 * 3);

    CHECK(throws_containing<validation_error>(
        [&] { (void)product(std::vector<Protocol>{q, q}, 3); }, "OutputSpaceTooLarge"));
}

TEST_CASE("product budget property") {
    for (int i = 0; i < 20; ++i) {
        const Protocol q1 = random_protocol(3, 3, 600 + i);
        const Protocol q2 = random_protocol(3, 2, 700 + i);
        const Protocol prod = product(std::vector<Protocol>{q1, q2});
        CHECK(ldp_level(prod) <= ldp_level(q1) + ldp_level(q2) + 1e-9);
    }
}

TEST_CASE("mixture") {
    const Protocol q = grr(3, 1.0);
    const Protocol single = mixture(std::vector<double>{1.0}, std::vector<Protocol>{q});
    CHECK(matrices_close(single, q));  // tags only change labels

    // The 3x3 pair from the mixture example: the half-half mixture is a
    // column-stochastic 6x3 protocol.
    const Protocol q1 = build_protocol({{1, 0, 0}, {0, 2. / 3, 1. / 3}, {0, 1. / 3, 2. / 3}});
    const Protocol q2 = build_protocol({{2. / 3, 1. / 3, 0}, {1. / 3, 2. / 3, 0}, {0, 0, 1}});
    const Protocol mix = mixture(std::vector<double>{0.5, 0.5}, std::vector<Protocol>{q1, q2});
    CHECK(mix.output_size() == 6);
    CHECK(mix.input_size() == 3);
    for (int x = 0; x < 3; ++x) {
        double sum = 0.0;
        for (int y = 0; y < 6; ++y) sum += mix.entry(y, x);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(mix.output_labels()[0] == "0:1");

    CHECK(throws_containing<validation_error>(
        [&] { (void)mixture(std::vector<double>{0.5, 0.4}, std::vector<Protocol>{q1, q2}); },
        "WeightMismatch"));
}

TEST_CASE("analyze_structure") {
    // det(GRR) = beta^{a-1}/(a+beta)^{a-1} != 0, so d = a.
    const auto g = analyze_structure(grr(3, 1.0));
    CHECK(g.rank == 3);
    CHECK(g.faithful);
    CHECK(g.class_count == 1);

    const auto p = analyze_structure(parity(4));
    CHECK(p.rank == 2);
    CHECK(!p.faithful);
    CHECK(p.class_count == 2);

    const auto id = analyze_structure(identity(5));
    CHECK(id.rank == 5);
    CHECK(id.class_count == 5);
}

TEST_CASE("faithfulness implies an injective pushforward") {
    const Protocol q = grr(3, 0.9);
    Xoshiro256pp rng(99);
    std::vector<double> alpha(3, 1.0);
    for (int i = 0; i < 100; ++i) {
        SimplexPoint p1, p2;
        p1.p.resize(3);
        p2.p.resize(3);
        rng.next_dirichlet(alpha, p1.p);
        rng.next_dirichlet(alpha, p2.p);
        const auto f1 = pushforward(q, p1);
        const auto f2 = pushforward(q, p2);
        double dist = 0.0, pdist = 0.0;
        for (int y = 0; y < 3; ++y) dist += std::abs(f1[y] - f2[y]);
        for (int x = 0; x < 3; ++x) pdist += std::abs(p1.p[x] - p2.p[x]);
        if (pdist > 1e-12) CHECK(dist > 0.0);
    }
}

TEST_CASE("structural invariants on random protocols") {
    Xoshiro256pp rng(4242);
    for (int i = 0; i < 30; ++i) {
        const int a = 2 + int(rng.next() % 3);
        const int b = 2 + int(rng.next() % 4);
        const Protocol q = random_protocol(a, b, rng.next());
        const auto analysis = analyze_structure(q);
        CHECK(analysis.rank >= 1);
        CHECK(analysis.rank <= std::min(a, q.output_size()));
        CHECK(analysis.class_count >= 1);
        CHECK(analysis.class_count <= q.output_size());
        CHECK(analysis.faithful == (analysis.rank == a));
        CHECK(ldp_level(q) >= 0.0);

        std::vector<double> alpha(a, 1.0), p(a);
        rng.next_dirichlet(alpha, p);
        const auto push = pushforward(q, SimplexPoint{p});
        double sum = 0.0;
        for (double v : push) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("worst case privacy closed form") {
    CHECK(worst_case_privacy(grr(3, 1.5)) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
    CHECK(worst_case_privacy(identity(3)) == 0.0);
    CHECK(worst_case_privacy(grr(4, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empirical worst case search") {
    CHECK(std::abs(worst_case_privacy_empirical(grr(3, 1.5)) - std::exp(-1.5)) < 1e-3);
    CHECK(worst_case_privacy_empirical(grr(3, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < 10; ++i) {
        const Protocol q = random_protocol(3, 3, 800 + i);
        CHECK(worst_case_privacy_empirical(q) >= worst_case_privacy(q) - 1e-12);
    }
}

TEST_CASE("simulate_population") {
    const DirichletPrior prior = jeffreys(2);

    const auto empty = simulate_population(grr(2, 1.0), prior, 0, 5);
    CHECK(empty.secrets.empty());
    CHECK(empty.report_tallies == std::vector<std::int64_t>{0, 0});

    const auto id_run = simulate_population(identity(2), prior, 500, 5);
    CHECK(id_run.secrets == id_run.reports);
    CHECK(id_run.report_tallies == id_run.secret_tallies);

    // Match frequency for GRR(2, eps=2) concentrates on e^eps/(e^eps+1).
    const double keep = std::exp(2.0) / (std::exp(2.0) + 1.0);
    const std::size_t n = 10'000;
    const auto run = simulate_population(grr(2, 2.0), jeffreys(2), n, 123);
    std::int64_t s_total = run.report_tallies[0] + run.report_tallies[1];
    std::int64_t t_total = run.secret_tallies[0] + run.secret_tallies[1];
    CHECK(s_total == std::int64_t(n));
    CHECK(t_total == std::int64_t(n));
    std::size_t match = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (run.secrets[i] == run.reports[i]) ++match;
    const double sigma = std::sqrt(keep * (1.0 - keep) / double(n));
    CHECK(std::abs(double(match) / double(n) - keep) < 3.0 * sigma);

    // Reproducibility: identical seed gives an identical sample.
    const auto again = simulate_population(grr(2, 2.0), jeffreys(2), n, 123);
    CHECK(again.secrets == run.secrets);
    CHECK(again.reports == run.reports);
    CHECK(simulate_population(grr(2, 2.0), jeffreys(2), n, 124).reports != run.reports);
}

TEST_CASE("json round trip") {
    const Protocol q = grr(3, 1.25);
    const Protocol back = protocol_from_json_text(protocol_to_json_text(q));
    CHECK(matrices_close(q, back, 1e-15));
    CHECK(back.output_labels() == q.output_labels());

    CHECK(throws_containing<validation_error>(
        [] { (void)protocol_from_json_text("{\"a\": 2"); }, "ParseError"));
    CHECK(throws_containing<validation_error>(
        [] {
            (void)protocol_from_json_text(
                "{\"a\": 2, \"b\": 2, \"matrix\": [[1.0, 0.3], [0.0, 0.3]]}");
        },
        "ColumnSumMismatch"));
}

}  // TEST_SUITE
