#include "ldp/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "ldp/linalg.hpp"
#include "ldp/math.hpp"
#include "ldp/prior.hpp"
#include "ldp/rng.hpp"

namespace ldp {

SimplexPoint SimplexPoint::checked(std::vector<double> values, double tol) {
    double sum = 0.0;
    for (double v : values) {
        if (!(v >= 0.0)) throw validation_error("SimplexPoint: negative entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > tol) {
        std::ostringstream msg;
        msg << "SimplexPoint: entries sum to " << sum;
        throw validation_error(msg.str());
    }
    return SimplexPoint{std::move(values)};
}

bool Protocol::is_deterministic() const {
    for (int x = 0; x < a_; ++x) {
        int ones = 0;
        for (int y = 0; y < b_; ++y) {
            const double v = entry(y, x);
            if (v == 1.0)
                ++ones;
            else if (v != 0.0)
                return false;
        }
        if (ones != 1) return false;
    }
    return true;
}

bool Protocol::has_identical_columns(double tol) const {
    for (int y = 0; y < b_; ++y)
        for (int x = 1; x < a_; ++x)
            if (std::abs(entry(y, x) - entry(y, 0)) > tol) return false;
    return true;
}

Protocol build_protocol(std::vector<std::vector<double>> rows,
                        std::vector<std::string> labels_in,
                        std::vector<std::string> labels_out) {
    const int b_raw = static_cast<int>(rows.size());
    if (b_raw < 1) throw validation_error("build_protocol: need at least one output row");
    const int a = static_cast<int>(rows[0].size());
    if (a < 2) throw validation_error("build_protocol: need input alphabet size a >= 2");
    for (const auto& row : rows)
        if (static_cast<int>(row.size()) != a)
            throw validation_error("build_protocol: ragged matrix");

    for (int y = 0; y < b_raw; ++y)
        for (int x = 0; x < a; ++x) {
            const double v = rows[y][x];
            if (!std::isfinite(v)) throw validation_error("build_protocol: non-finite entry");
            if (v < 0.0) {
                std::ostringstream msg;
                msg << "NegativeEntry: matrix[" << y << "][" << x << "] = " << v;
                throw validation_error(msg.str());
            }
        }

    // Column sums must be 1 within 1e-9; report the worst offender.
    double worst_dev = 0.0;
    int worst_col = 0;
    std::vector<double> col_sum(a, 0.0);
    for (int x = 0; x < a; ++x) {
        CompensatedSum s;
        for (int y = 0; y < b_raw; ++y) s.add(rows[y][x]);
        col_sum[x] = s.value();
        const double dev = std::abs(col_sum[x] - 1.0);
        if (dev > worst_dev) {
            worst_dev = dev;
            worst_col = x;
        }
    }
    if (worst_dev > 1e-9) {
        std::ostringstream msg;
        msg << "ColumnSumMismatch: column " << worst_col << " sums to " << col_sum[worst_col]
            << " (deviation " << worst_dev << ")";
        throw validation_error(msg.str());
    }

    if (labels_in.empty()) {
        labels_in.resize(a);
        for (int x = 0; x < a; ++x) labels_in[x] = std::to_string(x + 1);
    }
    if (labels_out.empty()) {
        labels_out.resize(b_raw);
        for (int y = 0; y < b_raw; ++y) labels_out[y] = std::to_string(y + 1);
    }
    if (static_cast<int>(labels_in.size()) != a || static_cast<int>(labels_out.size()) != b_raw)
        throw validation_error("build_protocol: label count mismatch");

    // trim_outputs: drop all-zero rows, keep surviving labels.
    Protocol q;
    q.a_ = a;
    q.labels_in_ = std::move(labels_in);
    for (int y = 0; y < b_raw; ++y) {
        bool nonzero = false;
        for (int x = 0; x < a; ++x)
            if (rows[y][x] > 0.0) nonzero = true;
        if (!nonzero) continue;
        for (int x = 0; x < a; ++x) q.matrix_.push_back(rows[y][x] / col_sum[x]);
        q.labels_out_.push_back(labels_out[y]);
    }
    q.b_ = static_cast<int>(q.labels_out_.size());
    return q;
}

double ldp_level(const Protocol& q) {
    double level = 0.0;
    for (int y = 0; y < q.output_size(); ++y) {
        double lo = kInfinity, hi = 0.0;
        for (int x = 0; x < q.input_size(); ++x) {
            const double v = q.entry(y, x);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi <= 0.0) continue;  // cannot happen after trimming
        if (lo <= 0.0) return kInfinity;
        level = std::max(level, std::log(hi / lo));
    }
    return level;
}

std::vector<double> pushforward(const Protocol& q, const SimplexPoint& p) {
    if (p.size() != q.input_size()) throw validation_error("pushforward: dimension mismatch");
    std::vector<double> out(q.output_size());
    for (int y = 0; y < q.output_size(); ++y) {
        double s = 0.0;
        for (int x = 0; x < q.input_size(); ++x) s += q.entry(y, x) * p.p[x];
        out[y] = s;
    }
    return out;
}

Protocol compose(const Protocol& outer, const Protocol& inner) {
    if (outer.input_size() != inner.output_size()) {
        std::ostringstream msg;
        msg << "DimensionMismatch: outer acts on " << outer.input_size()
            << " symbols but inner produces " << inner.output_size();
        throw validation_error(msg.str());
    }
    std::vector<std::vector<double>> rows(outer.output_size(),
                                          std::vector<double>(inner.input_size(), 0.0));
    for (int z = 0; z < outer.output_size(); ++z)
        for (int x = 0; x < inner.input_size(); ++x) {
            double s = 0.0;
            for (int y = 0; y < inner.output_size(); ++y)
                s += outer.entry(z, y) * inner.entry(y, x);
            rows[z][x] = s;
        }
    return build_protocol(std::move(rows), inner.input_labels(), outer.output_labels());
}

Protocol product(std::span<const Protocol> qs, std::size_t output_cap) {
    if (qs.empty()) throw validation_error("product: empty protocol list");
    const int a = qs[0].input_size();
    std::size_t b = 1;
    for (const auto& q : qs) {
        if (q.input_size() != a) throw validation_error("DimensionMismatch: product inputs differ");
        if (b > output_cap / std::size_t(q.output_size())) {
            std::ostringstream msg;
            msg << "OutputSpaceTooLarge: product output count exceeds cap " << output_cap;
            throw validation_error(msg.str());
        }
        b *= std::size_t(q.output_size());
    }
    std::vector<std::vector<double>> rows(b, std::vector<double>(a, 1.0));
    std::vector<std::string> labels(b);
    // Lexicographic tuple index: first protocol varies slowest.
    std::vector<int> idx(qs.size(), 0);
    for (std::size_t r = 0; r < b; ++r) {
        std::string label;
        for (std::size_t j = 0; j < qs.size(); ++j) {
            for (int x = 0; x < a; ++x) rows[r][x] *= qs[j].entry(idx[j], x);
            if (j) label += '|';
            label += qs[j].output_labels()[idx[j]];
        }
        labels[r] = label;
        for (std::size_t j = qs.size(); j-- > 0;) {
            if (++idx[j] < qs[j].output_size()) break;
            idx[j] = 0;
        }
    }
    return build_protocol(std::move(rows), qs[0].input_labels(), std::move(labels));
}

Protocol mixture(std::span<const double> weights, std::span<const Protocol> qs) {
    if (weights.size() != qs.size() || qs.empty())
        throw validation_error("WeightMismatch: need one weight per protocol");
    double wsum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw validation_error("WeightMismatch: negative weight");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-12) throw validation_error("WeightMismatch: weights do not sum to 1");
    const int a = qs[0].input_size();
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    for (std::size_t j = 0; j < qs.size(); ++j) {
        if (qs[j].input_size() != a)
            throw validation_error("DimensionMismatch: mixture inputs differ");
        for (int y = 0; y < qs[j].output_size(); ++y) {
            std::vector<double> row(a);
            for (int x = 0; x < a; ++x) row[x] = weights[j] * qs[j].entry(y, x);
            rows.push_back(std::move(row));
            labels.push_back(std::to_string(j) + ":" + qs[j].output_labels()[y]);
        }
    }
    return build_protocol(std::move(rows), qs[0].input_labels(), std::move(labels));
}

ProtocolAnalysis analyze_structure(const Protocol& q, double rank_tolerance) {
    ProtocolAnalysis out;
    out.ldp_level = ldp_level(q);

    std::vector<double> m(q.matrix().begin(), q.matrix().end());
    out.rank = qr_rank(std::move(m), q.output_size(), q.input_size(), rank_tolerance);
    out.faithful = (out.rank == q.input_size());

    out.reachable_outputs.resize(q.output_size());
    std::iota(out.reachable_outputs.begin(), out.reachable_outputs.end(), 0);

    // Union-find over outputs: merge y, y' whenever some input reaches both.
    std::vector<int> parent(q.output_size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (int x = 0; x < q.input_size(); ++x) {
        int first = -1;
        for (int y = 0; y < q.output_size(); ++y) {
            if (q.entry(y, x) <= 0.0) continue;
            if (first < 0)
                first = y;
            else
                parent[find(y)] = find(first);
        }
    }
    std::vector<std::vector<int>> groups(q.output_size());
    for (int y = 0; y < q.output_size(); ++y) groups[find(y)].push_back(y);
    for (auto& g : groups)
        if (!g.empty()) out.classes.push_back(std::move(g));
    out.class_count = static_cast<int>(out.classes.size());
    return out;
}

double worst_case_privacy(const Protocol& q) {
    const double level = ldp_level(q);
    return std::isinf(level) ? 0.0 : std::exp(-level);
}

namespace {

// H(X | Y=y, P=p) / H(X | P=p) for the two-point distribution
// p_x = 1-eps, p_x' = eps, evaluated in a form that stays accurate for
// eps down to ~1e-300 (log1p throughout, no 1-eps cancellation).
double two_point_ratio(double q_yx, double q_yxp, double eps) {
    const double denom = -( (1.0 - eps) * std::log1p(-eps) + eps * std::log(eps) );
    if (!(denom > 0.0)) return 1.0;
    const double total = q_yx * (1.0 - eps) + q_yxp * eps;
    if (total <= 0.0) return 1.0;  // output y impossible under p: non-binding
    const double u = q_yxp * eps / total;  // posterior weight of x'
    const double numer = -((1.0 - u) * std::log1p(-u) + (u > 0.0 ? u * std::log(u) : 0.0));
    return numer / denom;
}

// Ratio at a general interior point, minimized over outputs.
double interior_ratio(const Protocol& q, std::span<const double> p) {
    double h_prior = 0.0;
    for (double v : p) h_prior -= xlogx(v);
    if (!(h_prior > 0.0)) return 1.0;
    double best = kInfinity;
    for (int y = 0; y < q.output_size(); ++y) {
        double total = 0.0;
        for (int x = 0; x < q.input_size(); ++x) total += q.entry(y, x) * p[x];
        if (total <= 0.0) continue;
        double h_post = 0.0;
        for (int x = 0; x < q.input_size(); ++x)
            h_post -= xlogx(q.entry(y, x) * p[x] / total);
        best = std::min(best, h_post / h_prior);
    }
    return std::isfinite(best) ? best : 1.0;
}

}  // namespace

double worst_case_privacy_empirical(const Protocol& q, const WcSearchConfig& config) {
    double best = 1.0;

    // Near-vertex two-point family from the worst-case construction: for each
    // output y and ordered input pair (x, x'), walk eps toward 0 on a log grid.
    for (int y = 0; y < q.output_size(); ++y)
        for (int x = 0; x < q.input_size(); ++x) {
            const double qa = q.entry(y, x);
            if (qa <= 0.0) continue;
            for (int xp = 0; xp < q.input_size(); ++xp) {
                if (xp == x) continue;
                const double qb = q.entry(y, xp);
                double eps = 0.25;
                for (int step = 0; step < config.epsilon_steps && eps > 1e-300; ++step) {
                    best = std::min(best, two_point_ratio(qa, qb, eps));
                    eps *= config.epsilon_decay;
                }
            }
        }

    // Random interior points catch minima away from the vertices.
    Xoshiro256pp rng(config.seed);
    std::vector<double> alpha(q.input_size(), 1.0), p(q.input_size());
    for (int i = 0; i < config.random_points; ++i) {
        rng.next_dirichlet(alpha, p);
        best = std::min(best, interior_ratio(q, p));
    }
    return best;
}

PopulationSample simulate_population(const Protocol& q, const DirichletPrior& prior,
                                     std::size_t n, std::uint64_t seed) {
    if (prior.size() != q.input_size())
        throw validation_error("simulate_population: prior dimension mismatch");
    Xoshiro256pp rng(seed);
    PopulationSample out;
    out.true_distribution.p.resize(q.input_size());
    rng.next_dirichlet(prior.alpha, out.true_distribution.p);
    out.secrets.resize(n);
    out.reports.resize(n);
    out.report_tallies.assign(q.output_size(), 0);
    out.secret_tallies.assign(q.input_size(), 0);
    std::vector<double> column(q.output_size());
    for (std::size_t i = 0; i < n; ++i) {
        const int x = rng.next_discrete(out.true_distribution.p);
        for (int y = 0; y < q.output_size(); ++y) column[y] = q.entry(y, x);
        const int y = rng.next_discrete(column);
        out.secrets[i] = x;
        out.reports[i] = y;
        ++out.secret_tallies[x];
        ++out.report_tallies[y];
    }
    return out;
}

Protocol protocol_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw validation_error(std::string("ParseError: ") + e.what());
    }
    const int a = j.at("a").get<int>();
    const int b = j.at("b").get<int>();
    auto rows = j.at("matrix").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != b)
        throw validation_error("ParseError: matrix row count differs from b");
    for (const auto& row : rows)
        if (static_cast<int>(row.size()) != a)
            throw validation_error("ParseError: matrix column count differs from a");
    std::vector<std::string> labels_in, labels_out;
    if (j.contains("labels_in")) labels_in = j["labels_in"].get<std::vector<std::string>>();
    if (j.contains("labels_out")) labels_out = j["labels_out"].get<std::vector<std::string>>();
    return build_protocol(std::move(rows), std::move(labels_in), std::move(labels_out));
}

std::string protocol_to_json_text(const Protocol& q) {
    nlohmann::json j;
    j["a"] = q.input_size();
    j["b"] = q.output_size();
    std::vector<std::vector<double>> rows(q.output_size(), std::vector<double>(q.input_size()));
    for (int y = 0; y < q.output_size(); ++y)
        for (int x = 0; x < q.input_size(); ++x) rows[y][x] = q.entry(y, x);
    j["matrix"] = rows;
    j["labels_in"] = q.input_labels();
    j["labels_out"] = q.output_labels();
    return j.dump(2);
}

Protocol load_protocol_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("ParseError: cannot open protocol file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return protocol_from_json_text(buffer.str());
}

}  // namespace ldp
