#pragma once

// Analysis reports and parameter sweeps: the engine behind the CLI's
// `analyze` and `sweep` subcommands.  Budget or precondition failures on
// individual fields are recorded in the report's `errors` array instead
// of aborting the whole report.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldp/metrics_finite.hpp"
#include "ldp/metrics_population.hpp"
#include "ldp/prior.hpp"
#include "ldp/protocol.hpp"

namespace ldp {

inline constexpr const char* kToolVersion = "0.1.0";

struct AnalyzeOptions {
    McConfig mc;
    EnumerationBudget budget;
    std::optional<int> n;  // include finite-n metrics when set
};

struct AnalyzeReport {
    std::string protocol_spec;
    std::string prior_spec;
    int a = 0;
    int b = 0;
    ProtocolAnalysis analysis;
    double s_wc = 0.0;
    std::optional<MetricEstimate> s_mu;
    std::optional<MetricEstimate> u_as;
    std::optional<MetricEstimate> f_mu;
    std::optional<TradeoffBounds> bounds;
    std::optional<LimitPrediction> limits;
    std::optional<int> n;
    std::optional<MetricEstimate> mi_reports_p;
    std::optional<MetricEstimate> mi_reports_tallies;
    std::optional<MetricEstimate> h_tallies;
    std::optional<MetricEstimate> u_distr;
    std::optional<MetricEstimate> u_tally;
    std::optional<MetricEstimate> u_digit;
    std::vector<std::string> errors;
};

AnalyzeReport analyze(const Protocol& q, const DirichletPrior& prior, const AnalyzeOptions& options,
                      const std::string& protocol_spec = "", const std::string& prior_spec = "");

std::string report_to_json(const AnalyzeReport& report);
std::string report_to_text(const AnalyzeReport& report);

/// One protocol family swept over epsilon, a, or n.
struct SweepSpec {
    std::string family;                    // grr, ue, oue, rappor, blh, lh, parity, id
    std::map<std::string, double> fixed;   // fixed family parameters
    std::string variable;                  // "eps", "a", or "n"
    std::vector<double> grid;              // nonempty, strictly increasing
    std::string prior_spec = "jeffreys";
    McConfig mc;
    EnumerationBudget budget;
};

/// Deterministic CSV (17 significant digits, '.' decimal separator, header
/// row first).  Columns:
///   param, ldp, s_wc, s_mu, s_mu_se, u_as, u_as_se, f_mu, f_mu_se, bound_uas, bound_fmu
/// n-sweeps append u_distr, u_distr_se, u_tally, u_tally_se, u_digit, u_digit_se.
/// Fields a protocol does not support (utility of a non-faithful protocol,
/// degenerate bounds) are left empty.
std::string sweep_csv(const SweepSpec& spec);

/// The protocol spec string for one grid point of a sweep.
std::string sweep_point_spec(const SweepSpec& spec, double value);

}  // namespace ldp
