#include "ldp/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "ldp/spec_parse.hpp"

namespace ldp {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json estimate_json(const MetricEstimate& e) {
    nlohmann::json j;
    j["value"] = e.value;
    j["std_error"] = e.std_error;
    j["method"] = method_name(e.method);
    if (e.method == Method::monte_carlo) {
        j["sample_count"] = e.sample_count;
        j["seed"] = e.seed;
    }
    return j;
}

}  // namespace

AnalyzeReport analyze(const Protocol& q, const DirichletPrior& prior, const AnalyzeOptions& options,
                      const std::string& protocol_spec, const std::string& prior_spec) {
    AnalyzeReport report;
    report.protocol_spec = protocol_spec;
    report.prior_spec = prior_spec;
    report.a = q.input_size();
    report.b = q.output_size();
    report.analysis = analyze_structure(q);
    report.s_wc = worst_case_privacy(q);

    auto guard = [&](const char* field, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            report.errors.push_back(std::string(field) + ": " + e.what());
        }
    };
    guard("s_mu", [&] { report.s_mu = avg_privacy(q, prior, options.mc); });
    if (report.analysis.faithful) {
        guard("u_as", [&] { report.u_as = asymptotic_utility(q, prior, options.mc); });
        guard("f_mu", [&] { report.f_mu = effective_participation(q, prior, options.mc); });
        guard("bounds", [&] { report.bounds = tradeoff_bounds(q, prior, options.mc); });
    } else {
        report.f_mu = MetricEstimate::exact(0.0);
    }
    guard("limits", [&] { report.limits = limit_predictions(q, prior, options.mc); });

    if (options.n) {
        report.n = options.n;
        const int n = *options.n;
        guard("mi_reports_p",
              [&] { report.mi_reports_p = mutual_info_reports_vs_p(q, prior, n, options.budget); });
        guard("mi_reports_tallies", [&] {
            report.mi_reports_tallies = mutual_info_reports_vs_tallies(q, prior, n, options.budget);
        });
        guard("h_tallies",
              [&] { report.h_tallies = entropy_tallies(prior, n, q.input_size(), options.budget); });
        guard("u_distr", [&] { report.u_distr = distribution_utility(q, prior, n, options.budget); });
        guard("u_tally", [&] { report.u_tally = tally_utility(q, prior, n, options.budget); });
        if (report.analysis.faithful)
            guard("u_digit", [&] { report.u_digit = digit_utility(q, prior, n, options.budget); });
    }
    return report;
}

std::string report_to_json(const AnalyzeReport& r) {
    nlohmann::json j;
    j["tool_version"] = kToolVersion;
    if (!r.protocol_spec.empty()) j["protocol"] = r.protocol_spec;
    if (!r.prior_spec.empty()) j["prior"] = r.prior_spec;
    j["a"] = r.a;
    j["b"] = r.b;
    j["ldp_level"] = std::isinf(r.analysis.ldp_level) ? nlohmann::json("inf")
                                                      : nlohmann::json(r.analysis.ldp_level);
    j["rank"] = r.analysis.rank;
    j["faithful"] = r.analysis.faithful;
    j["class_count"] = r.analysis.class_count;
    j["reachable_outputs"] = r.analysis.reachable_outputs;
    j["classes"] = r.analysis.classes;
    j["s_wc"] = r.s_wc;
    if (r.s_mu) j["s_mu"] = estimate_json(*r.s_mu);
    if (r.u_as) j["u_as"] = estimate_json(*r.u_as);
    if (r.f_mu) j["f_mu"] = estimate_json(*r.f_mu);
    if (r.bounds) {
        j["bound_uas"] = estimate_json(r.bounds->utility_bound);
        j["bound_fmu"] = estimate_json(r.bounds->participation_bound);
    }
    if (r.limits) {
        j["limits"]["u_distr_limit"] = r.limits->u_distr_limit;
        j["limits"]["u_tally_limit"] = r.limits->u_tally_limit;
        if (r.limits->digit_intercept) {
            j["limits"]["digit_slope"] = r.limits->digit_slope;
            j["limits"]["digit_intercept"] = estimate_json(*r.limits->digit_intercept);
            j["limits"]["one_minus_udistr_scale"] = estimate_json(*r.limits->one_minus_udistr_scale);
            j["limits"]["r_mu"] = estimate_json(*r.limits->r_mu);
        }
    }
    if (r.n) {
        j["n"] = *r.n;
        if (r.mi_reports_p) j["mi_reports_p"] = estimate_json(*r.mi_reports_p);
        if (r.mi_reports_tallies) j["mi_reports_tallies"] = estimate_json(*r.mi_reports_tallies);
        if (r.h_tallies) j["h_tallies"] = estimate_json(*r.h_tallies);
        if (r.u_distr) j["u_distr"] = estimate_json(*r.u_distr);
        if (r.u_tally) j["u_tally"] = estimate_json(*r.u_tally);
        if (r.u_digit) j["u_digit"] = estimate_json(*r.u_digit);
    }
    j["errors"] = r.errors;
    return j.dump(2) + "\n";
}

std::string report_to_text(const AnalyzeReport& r) {
    std::ostringstream out;
    auto line = [&](const char* name, const std::optional<MetricEstimate>& e) {
        if (!e) return;
        out << "  " << name << " = " << fmt17(e->value);
        if (e->method == Method::monte_carlo) out << " +- " << fmt17(e->std_error);
        out << "  [" << method_name(e->method) << "]\n";
    };
    out << "protocol";
    if (!r.protocol_spec.empty()) out << " " << r.protocol_spec;
    out << ": a=" << r.a << " b=" << r.b << "\n";
    out << "  ldp_level = " << (std::isinf(r.analysis.ldp_level) ? "inf" : fmt17(r.analysis.ldp_level))
        << "\n  rank d = " << r.analysis.rank << (r.analysis.faithful ? " (faithful)" : " (not faithful)")
        << "\n  output classes b' = " << r.analysis.class_count << "\n";
    out << "  s_wc = " << fmt17(r.s_wc) << "\n";
    line("s_mu", r.s_mu);
    line("u_as", r.u_as);
    line("f_mu", r.f_mu);
    if (r.bounds) {
        line("bound_uas", r.bounds->utility_bound);
        line("bound_fmu", r.bounds->participation_bound);
    }
    if (r.limits) {
        out << "  u_distr_limit = " << fmt17(r.limits->u_distr_limit)
            << "\n  u_tally_limit = " << fmt17(r.limits->u_tally_limit) << "\n";
        if (r.limits->digit_intercept)
            out << "  digit asymptote = 0.5 log n + " << fmt17(r.limits->digit_intercept->value) << "\n";
    }
    if (r.n) {
        out << "  n = " << *r.n << "\n";
        line("I(Y;P)", r.mi_reports_p);
        line("I(S;T)", r.mi_reports_tallies);
        line("H(T)", r.h_tallies);
        line("u_distr", r.u_distr);
        line("u_tally", r.u_tally);
        line("u_digit", r.u_digit);
    }
    for (const auto& e : r.errors) out << "  error: " << e << "\n";
    return out.str();
}

std::string sweep_point_spec(const SweepSpec& spec, double value) {
    std::ostringstream s;
    s << spec.family << ":";
    bool first = true;
    auto add = [&](const std::string& key, double v) {
        if (!first) s << ",";
        first = false;
        s << key << "=" << fmt17(v);
    };
    for (const auto& [key, v] : spec.fixed) add(key, v);
    if (spec.variable != "n") add(spec.variable, value);
    return s.str();
}

std::string sweep_csv(const SweepSpec& spec) {
    if (spec.grid.empty()) throw validation_error("sweep: empty grid");
    for (std::size_t i = 1; i < spec.grid.size(); ++i)
        if (!(spec.grid[i] > spec.grid[i - 1]))
            throw validation_error("sweep: grid must be strictly increasing");
    if (spec.variable != "eps" && spec.variable != "a" && spec.variable != "n")
        throw validation_error("sweep: variable must be eps, a, or n");

    const bool with_n = spec.variable == "n";
    std::ostringstream csv;
    csv << "param,ldp,s_wc,s_mu,s_mu_se,u_as,u_as_se,f_mu,f_mu_se,bound_uas,bound_fmu";
    if (with_n) csv << ",u_distr,u_distr_se,u_tally,u_tally_se,u_digit,u_digit_se";
    csv << "\n";

    auto cell = [&](const std::optional<MetricEstimate>& e, bool with_se) {
        std::string s;
        if (e && std::isfinite(e->value)) {
            s = fmt17(e->value);
            if (with_se) s += "," + fmt17(e->std_error);
        } else if (with_se) {
            s = ",";
        }
        return s;
    };

    for (double value : spec.grid) {
        const std::string point = sweep_point_spec(spec, value);
        const Protocol q = parse_protocol_spec(point);
        const DirichletPrior prior = parse_prior_spec(spec.prior_spec, q.input_size());
        AnalyzeOptions options;
        options.mc = spec.mc;
        options.budget = spec.budget;
        if (with_n) options.n = static_cast<int>(value);
        const AnalyzeReport r = analyze(q, prior, options, point, spec.prior_spec);

        csv << fmt17(value) << ",";
        csv << (std::isinf(r.analysis.ldp_level) ? "inf" : fmt17(r.analysis.ldp_level)) << ",";
        csv << fmt17(r.s_wc) << ",";
        csv << cell(r.s_mu, true) << ",";
        csv << cell(r.u_as, true) << ",";
        csv << cell(r.f_mu, true) << ",";
        std::optional<MetricEstimate> b1, b2;
        if (r.bounds) {
            b1 = r.bounds->utility_bound;
            b2 = r.bounds->participation_bound;
        }
        csv << cell(b1, false) << "," << cell(b2, false);
        if (with_n)
            csv << "," << cell(r.u_distr, true) << "," << cell(r.u_tally, true) << ","
                << cell(r.u_digit, true);
        csv << "\n";
    }
    return csv.str();
}

}  // namespace ldp
