#pragma once

// Verification suites behind the `verify` subcommand: inequality checks
// over seeded random protocols, closed-form vs general dual paths, the
// full-joint enumeration oracle, and the reference values quoted from
// the analysis of the 3x3 mixture example.

#include <cstdint>
#include <string>
#include <vector>

#include "ldp/prior.hpp"
#include "ldp/protocol.hpp"

namespace ldp {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double reference = 0.0;   // bound or expected value
    double tolerance = 0.0;   // slack applied (3 sigma or absolute)
    std::string note;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Known suites: "theorems", "closed-forms", "oracle", "paper-numbers".
/// Throws metric_error("UnknownSuite: ...") otherwise.
SuiteResult run_suite(const std::string& name, std::uint64_t seed);
std::vector<std::string> suite_names();

/// Seeded random column-stochastic protocol (columns ~ uniform Dirichlet).
Protocol random_protocol(int a, int b, std::uint64_t seed);
/// As above but resampled until faithful.
Protocol random_faithful_protocol(int a, int b, std::uint64_t seed);

namespace oracle {

/// Exact small-instance quantities from first principles: enumerates every
/// (secret vector, report vector) pair and integrates over the prior with
/// adaptive quadrature.  Independent of the tally-enumeration code paths it
/// is used to certify.  a = 2 only.
struct FullJointResult {
    double mi_reports_p = 0.0;       // I(Yvec; P)
    double mi_reports_tallies = 0.0; // I(S; T)
    double h_tallies = 0.0;          // H(T)
};
FullJointResult full_joint_quantities(const Protocol& q, const DirichletPrior& prior, int n);

}  // namespace oracle

}  // namespace ldp
