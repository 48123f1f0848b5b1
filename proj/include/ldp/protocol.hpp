#pragma once

// Privacy protocols as finite stochastic matrices.
//
// ORIENTATION: the matrix is COLUMN-stochastic and stored row-major with
// entry(y, x) = Q(y|x), the probability that input x is reported as
// output y.  Rows are indexed by outputs (size b), columns by inputs
// (size a); every column sums to 1.  Mixing this up is the classic bug,
// so all code goes through entry(y, x).
//
// Outputs that are unreachable (all-zero rows) are removed at
// construction time; the labels of the surviving rows are kept.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldp {

struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A probability distribution over the input alphabet.
struct SimplexPoint {
    std::vector<double> p;

    int size() const { return static_cast<int>(p.size()); }
    /// Validates entries >= 0 and sum within `tol` of 1 (default 1e-12).
    static SimplexPoint checked(std::vector<double> values, double tol = 1e-12);
};

class Protocol {
  public:
    int input_size() const { return a_; }
    int output_size() const { return b_; }
    double entry(int y, int x) const { return matrix_[std::size_t(y) * a_ + x]; }
    std::span<const double> row(int y) const { return {matrix_.data() + std::size_t(y) * a_, std::size_t(a_)}; }
    std::span<const double> matrix() const { return matrix_; }

    const std::vector<std::string>& input_labels() const { return labels_in_; }
    const std::vector<std::string>& output_labels() const { return labels_out_; }

    /// True if every column has exactly one nonzero entry equal to 1.
    bool is_deterministic() const;
    /// True if all columns are identical (the output carries no information).
    bool has_identical_columns(double tol = 0.0) const;

    friend Protocol build_protocol(std::vector<std::vector<double>> rows,
                                   std::vector<std::string> labels_in,
                                   std::vector<std::string> labels_out);

  private:
    int a_ = 0;
    int b_ = 0;
    std::vector<double> matrix_;  // row-major b x a
    std::vector<std::string> labels_in_, labels_out_;
};

/// Validates and normalizes a b x a probability table given as rows by output.
///
/// Rejects negative entries (NegativeEntry) and columns whose sum deviates
/// from 1 by more than 1e-9 (ColumnSumMismatch, reporting the worst column).
/// Accepted columns are rescaled to sum to 1 exactly (up to rounding), and
/// all-zero output rows are dropped (`trim_outputs`).
Protocol build_protocol(std::vector<std::vector<double>> rows,
                        std::vector<std::string> labels_in = {},
                        std::vector<std::string> labels_out = {});

/// Structural analysis: LDP level, rank, faithfulness, output classes.
struct ProtocolAnalysis {
    double ldp_level = 0.0;          // may be +infinity
    int rank = 0;                    // d = numerical rank of the matrix
    bool faithful = false;           // d == a
    std::vector<int> reachable_outputs;   // B_{>0} (all rows after trimming)
    int class_count = 0;             // b' = #(B_{>0}/~)
    std::vector<std::vector<int>> classes;  // partition of reachable outputs
};

/// max over outputs y and input pairs of log(Q(y|x)/Q(y|x')); +infinity when a
/// surviving row mixes zero and positive entries.  0/0 pairs are non-binding.
double ldp_level(const Protocol& q);

/// The distribution of the report when the input is drawn from p: Q * p.
std::vector<double> pushforward(const Protocol& q, const SimplexPoint& p);

/// Postprocessing: run `inner` first, then `outer` on its output.
Protocol compose(const Protocol& outer, const Protocol& inner);

/// Simultaneous release of all protocols' outputs (Cartesian product outputs).
Protocol product(std::span<const Protocol> qs, std::size_t output_cap = 1u << 20);

/// Randomized choice: report (j, Q^j(x)) with j drawn from `weights`.
Protocol mixture(std::span<const double> weights, std::span<const Protocol> qs);

ProtocolAnalysis analyze_structure(const Protocol& q, double rank_tolerance = 1e-10);

/// e^{-LDP}; 0 when the LDP level is infinite.
double worst_case_privacy(const Protocol& q);

/// Numerical search for inf over outputs y and simplex points p of
/// H(X|Y=y, P=p) / H(X|P=p).  Scans the two-point near-vertex family
/// p = (1-eps on x, eps on x') down to extremely small eps plus random
/// interior points.  The result is an upper bound on the true infimum.
struct WcSearchConfig {
    int epsilon_steps = 130;         // log-spaced from 0.25 down to ~1e-300
    double epsilon_decay = 0.005;    // multiplicative step between grid points
    int random_points = 200;
    std::uint64_t seed = 1;
};
double worst_case_privacy_empirical(const Protocol& q, const WcSearchConfig& config = {});

/// One simulated round of the reporting model.
struct PopulationSample {
    SimplexPoint true_distribution;
    std::vector<int> secrets;            // x_i, values in [0, a)
    std::vector<int> reports;            // y_i, values in [0, b)
    std::vector<std::int64_t> report_tallies;  // s_y
    std::vector<std::int64_t> secret_tallies;  // t_x
};

struct DirichletPrior;  // prior.hpp

/// Draw P ~ prior, X_i iid ~ P, Y_i ~ Q(.|X_i); deterministic per seed.
PopulationSample simulate_population(const Protocol& q, const DirichletPrior& prior,
                                     std::size_t n, std::uint64_t seed);

/// JSON protocol file: {"a", "b", "matrix" (row-major by output), "labels_in", "labels_out"}.
Protocol protocol_from_json_text(const std::string& text);
std::string protocol_to_json_text(const Protocol& q);
Protocol load_protocol_file(const std::string& path);

}  // namespace ldp
