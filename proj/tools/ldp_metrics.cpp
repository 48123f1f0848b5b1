// Command-line front end: analysis reports, parameter sweeps, posterior
// queries, and the verification suites.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldp/catalog.hpp"
#include "ldp/posterior.hpp"
#include "ldp/report.hpp"
#include "ldp/spec_parse.hpp"
#include "ldp/verify.hpp"

namespace {

struct CommonFlags {
    std::string protocol;
    std::string prior = "jeffreys";
    std::size_t samples = 200'000;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string format = "text";
    std::string out_path;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_protocol = true) {
    if (with_protocol)
        cmd->add_option("--protocol", flags.protocol, "builtin spec (grr:a=4,eps=2) or JSON file path")
            ->required();
    cmd->add_option("--prior", flags.prior, "jeffreys or dirichlet:a1,a2,...");
    cmd->add_option("--samples", flags.samples, "Monte Carlo sample count");
    cmd->add_option("--seed", flags.seed, "random seed");
    cmd->add_option("--workers", flags.workers, "worker threads (results are identical for any count)");
    cmd->add_option("--out", flags.out_path, "output file (stdout when omitted)");
}

ldp::McConfig mc_config(const CommonFlags& flags) {
    ldp::McConfig cfg;
    cfg.samples = flags.samples;
    cfg.seed = flags.seed;
    cfg.workers = flags.workers;
    return cfg;
}

ldp::EnumerationBudget budget_from_env(const CommonFlags& flags) {
    ldp::EnumerationBudget budget;
    budget.mc = mc_config(flags);
    if (const char* env = std::getenv("LDP_METRICS_BUDGET")) {
        try {
            budget.max_states = std::stoull(env);
        } catch (...) {
            throw ldp::parse_error("ParseError: LDP_METRICS_BUDGET must be an integer");
        }
    }
    return budget;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
}

std::vector<double> parse_grid(const std::string& grid) {
    std::vector<double> values;
    if (grid.find(':') != std::string::npos) {  // lo:hi:count, linearly spaced
        double lo, hi;
        int count;
        char c1, c2;
        std::istringstream ss(grid);
        if (!(ss >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1)
            throw ldp::parse_error("ParseError: grid must be v1,v2,... or lo:hi:count");
        for (int i = 0; i < count; ++i)
            values.push_back(count == 1 ? lo : lo + (hi - lo) * double(i) / double(count - 1));
        return values;
    }
    std::stringstream ss(grid);
    std::string item;
    while (std::getline(ss, item, ','))
        values.push_back(std::stod(item));
    return values;
}

int run_analyze(const CommonFlags& flags, std::optional<int> n) {
    const ldp::Protocol q = ldp::load_protocol(flags.protocol);
    const ldp::DirichletPrior prior = ldp::parse_prior_spec(flags.prior, q.input_size());
    ldp::AnalyzeOptions options;
    options.mc = mc_config(flags);
    options.budget = budget_from_env(flags);
    options.n = n;
    const ldp::AnalyzeReport report = ldp::analyze(q, prior, options, flags.protocol, flags.prior);
    emit(flags.out_path, flags.format == "json" ? ldp::report_to_json(report)
                                                : ldp::report_to_text(report));
    return 0;
}

int run_sweep(const CommonFlags& flags, const std::string& variable, const std::string& grid) {
    ldp::SweepSpec spec;
    const auto colon = flags.protocol.find(':');
    spec.family = flags.protocol.substr(0, colon);
    if (colon != std::string::npos) {
        std::stringstream ss(flags.protocol.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw ldp::parse_error("ParseError: expected key=value in protocol spec");
            spec.fixed[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        }
    }
    spec.variable = variable;
    spec.grid = parse_grid(grid);
    spec.prior_spec = flags.prior;
    spec.mc = mc_config(flags);
    spec.budget = budget_from_env(flags);
    emit(flags.out_path, ldp::sweep_csv(spec));
    return 0;
}

int run_posterior(const CommonFlags& flags, const std::string& counts, std::size_t top_k) {
    const ldp::Protocol q = ldp::load_protocol(flags.protocol);
    const ldp::DirichletPrior prior = ldp::parse_prior_spec(flags.prior, q.input_size());
    std::vector<int> tallies;
    std::stringstream ss(counts);
    std::string item;
    while (std::getline(ss, item, ',')) tallies.push_back(std::stoi(item));

    nlohmann::json j;
    j["tool_version"] = ldp::kToolVersion;
    j["protocol"] = flags.protocol;
    j["prior"] = flags.prior;
    j["counts"] = tallies;

    const ldp::PosteriorDensity density = ldp::posterior_unnormalized(q, prior, tallies);
    ldp::EnumerationBudget budget = budget_from_env(flags);
    try {
        const ldp::DirichletMixture mix = ldp::posterior_dirichlet_mixture(q, prior, tallies, budget);
        j["path"] = "mixture";
        j["normalizer"] = {{"value", mix.normalizer.value}, {"method", "exact"}};
        nlohmann::json comps = nlohmann::json::array();
        for (std::size_t i = 0; i < mix.components.size() && i < top_k; ++i)
            comps.push_back({{"weight", mix.components[i].weight},
                             {"alpha", mix.components[i].alpha}});
        j["components"] = comps;
        j["component_count"] = mix.components.size();
        nlohmann::json marginals = nlohmann::json::array();
        for (int x = 0; x < q.input_size(); ++x) {
            nlohmann::json betas = nlohmann::json::array();
            for (std::size_t i = 0; i < mix.components.size() && i < top_k; ++i) {
                double alpha0 = 0.0;
                for (double v : mix.components[i].alpha) alpha0 += v;
                betas.push_back({{"weight", mix.components[i].weight},
                                 {"alpha", mix.components[i].alpha[x]},
                                 {"beta", alpha0 - mix.components[i].alpha[x]}});
            }
            marginals.push_back(betas);
        }
        j["beta_marginals"] = marginals;
        const ldp::PosteriorMoments moments = ldp::posterior_moments(mix);
        j["mean"] = moments.mean;
        j["variance"] = moments.variance;
    } catch (const ldp::budget_error& e) {
        j["path"] = "monte-carlo";
        j["mixture_error"] = e.what();
        const ldp::McConfig cfg = mc_config(flags);
        const ldp::MetricEstimate c = ldp::normalize_mc(density, cfg);
        j["normalizer"] = {{"value", c.value},
                           {"std_error", c.std_error},
                           {"method", "monte-carlo"},
                           {"sample_count", c.sample_count},
                           {"seed", c.seed}};
        const ldp::PosteriorMoments moments = ldp::posterior_moments(density, cfg);
        j["mean"] = moments.mean;
        j["variance"] = moments.variance;
        j["effective_sample_size"] = moments.effective_sample_size;
    }
    emit(flags.out_path, j.dump(2) + "\n");
    return 0;
}

int run_verify(const std::string& suite, std::uint64_t seed, const std::string& out_path) {
    const ldp::SuiteResult result = ldp::run_suite(suite, seed);
    std::ostringstream out;
    for (const auto& c : result.checks) {
        out << (c.pass ? "[PASS] " : "[FAIL] ") << result.suite << ": " << c.name
            << "  measured=" << c.measured << " reference=" << c.reference
            << " tolerance=" << c.tolerance;
        if (!c.note.empty()) out << "  (" << c.note << ")";
        out << " seed=" << seed << "\n";
    }
    out << (result.all_pass() ? "PASS" : "FAIL") << " suite " << result.suite << " ("
        << result.checks.size() << " checks)\n";
    emit(out_path, out.str());
    return result.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"information-theoretic privacy and utility metrics for LDP protocols"};
    app.require_subcommand(1);

    CommonFlags a_flags;
    std::optional<int> a_n;
    auto* analyze = app.add_subcommand("analyze", "structural analysis and metrics report");
    add_common(analyze, a_flags);
    analyze->add_option("--n", a_n, "include exact finite-n metrics for this population size");
    analyze->add_option("--format", a_flags.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    CommonFlags s_flags;
    std::string s_variable = "eps", s_grid;
    auto* sweep = app.add_subcommand("sweep", "CSV sweep over eps, a, or n");
    add_common(sweep, s_flags);
    sweep->add_option("--sweep", s_variable, "swept variable: eps, a, or n")
        ->check(CLI::IsMember({"eps", "a", "n"}));
    sweep->add_option("--grid", s_grid, "comma list v1,v2,... or lo:hi:count")->required();

    CommonFlags p_flags;
    std::string p_counts;
    std::size_t p_topk = 1000;
    auto* posterior = app.add_subcommand("posterior", "posterior of P given report counts");
    add_common(posterior, p_flags);
    posterior->add_option("--counts", p_counts, "report tallies, one count per output")->required();
    posterior->add_option("--top-k", p_topk, "mixture components to emit (by weight)");

    std::string v_suite;
    std::uint64_t v_seed = 0;
    std::string v_out;
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", v_suite, "theorems, closed-forms, oracle, or paper-numbers")
        ->required();
    verify->add_option("--seed", v_seed, "random seed");
    verify->add_option("--out", v_out, "output file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return run_analyze(a_flags, a_n);
        if (sweep->parsed()) return run_sweep(s_flags, s_variable, s_grid);
        if (posterior->parsed()) return run_posterior(p_flags, p_counts, p_topk);
        if (verify->parsed()) return run_verify(v_suite, v_seed, v_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
