#include "numgame/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "numgame/error.hpp"
#include "numgame/text.hpp"

namespace numgame {

namespace {

void check_entries(std::span<const double> v, bool unit_interval) {
    for (double x : v) {
        if (std::isnan(x) || x < 0.0) {
            throw Error(ErrorCode::NegativeEntry, "JSD input has a negative or NaN entry");
        }
        if (unit_interval && x > 1.0) {
            throw Error(ErrorCode::Validation,
                        "per-target JSD needs probabilities in [0, 1], got " + format_double(x));
        }
    }
}

std::vector<double> to_distribution(std::span<const double> v, std::size_t* zero_sum) {
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    std::vector<double> out(v.size());
    if (total <= 0.0) {
        if (zero_sum != nullptr) {
            ++*zero_sum;
        }
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(v.size()));
        return out;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = v[i] / total;
    }
    return out;
}

double term(double p, double m) {
    return p > 0.0 ? p * std::log2(p / m) : 0.0;
}

double jsd_of_distributions(std::span<const double> p, std::span<const double> q) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        sum += 0.5 * (term(p[i], m) + term(q[i], m));
    }
    return sum;
}

double bernoulli_jsd(double p, double q) {
    const double mp = 0.5 * (p + q);
    const double mn = 0.5 * ((1.0 - p) + (1.0 - q));
    return 0.5 * (term(p, mp) + term(q, mp)) + 0.5 * (term(1.0 - p, mn) + term(1.0 - q, mn));
}

} // namespace

std::string_view to_string(JsdConvention convention) noexcept {
    return convention == JsdConvention::Normalized ? "normalized" : "per-target-mean";
}

JsdConvention parse_jsd_convention(std::string_view text) {
    if (text == "normalized") return JsdConvention::Normalized;
    if (text == "per-target-mean") return JsdConvention::PerTargetMean;
    throw Error(ErrorCode::Usage, "unknown JSD convention '" + std::string(text) +
                                      "' (expected normalized or per-target-mean)");
}

void ResponseMatrix::validate() const {
    for (const auto& [set_id, row] : rows) {
        if (row.size() != static_cast<std::size_t>(domain_max)) {
            throw Error(ErrorCode::Shape, "agent '" + agent + "', set '" + set_id + "': expected " +
                                              std::to_string(domain_max) + " values, got " +
                                              std::to_string(row.size()));
        }
        for (double v : row) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw Error(ErrorCode::Validation, "agent '" + agent + "', set '" + set_id +
                                                       "': p_yes " + format_double(v) +
                                                       " outside [0, 1]");
            }
        }
    }
}

GroupStats summarize(std::span<const double> values) {
    GroupStats s;
    s.count = values.size();
    if (s.count == 0) {
        return s;
    }
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        const double sd = std::sqrt(ss / static_cast<double>(s.count - 1));
        s.sem = sd / std::sqrt(static_cast<double>(s.count));
    }
    return s;
}

SetLengths set_lengths(std::span<const ExampleSet> sets) {
    SetLengths out;
    for (const auto& s : sets) {
        out.emplace(s.id, s.length());
    }
    return out;
}

double jsd(std::span<const double> p, std::span<const double> q, JsdConvention convention,
           std::size_t* zero_sum) {
    if (p.size() != q.size() || p.empty()) {
        throw Error(ErrorCode::Shape, "JSD inputs must be non-empty and of equal length (" +
                                          std::to_string(p.size()) + " vs " +
                                          std::to_string(q.size()) + ")");
    }
    const bool per_target = convention == JsdConvention::PerTargetMean;
    check_entries(p, per_target);
    check_entries(q, per_target);

    double value = 0.0;
    if (per_target) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            value += bernoulli_jsd(p[i], q[i]);
        }
        value /= static_cast<double>(p.size());
    } else {
        const auto pn = to_distribution(p, zero_sum);
        const auto qn = to_distribution(q, zero_sum);
        value = jsd_of_distributions(pn, qn);
    }
    return std::clamp(value, 0.0, 1.0);
}

DivergenceReport evaluate_pair(const ResponseMatrix& a, const ResponseMatrix& b,
                               const SetLengths& lengths, JsdConvention convention) {
    if (a.domain_max != b.domain_max) {
        throw Error(ErrorCode::Shape, "agents '" + a.agent + "' and '" + b.agent +
                                          "' use different domains");
    }
    DivergenceReport report;
    report.agent_a = a.agent;
    report.agent_b = b.agent;
    report.convention = convention;

    std::map<std::size_t, std::vector<double>> grouped;
    std::vector<double> all;
    for (const auto& [set_id, row_a] : a.rows) {
        const auto it = b.rows.find(set_id);
        if (it == b.rows.end()) {
            continue;
        }
        const auto len = lengths.find(set_id);
        if (len == lengths.end()) {
            throw Error(ErrorCode::Validation, "set '" + set_id + "' is not a known example set");
        }
        const double d = jsd(row_a, it->second, convention, &report.zero_sum_vectors);
        report.per_set.emplace(set_id, d);
        report.set_length.emplace(set_id, len->second);
        grouped[len->second].push_back(d);
        all.push_back(d);
    }
    if (all.empty()) {
        throw Error(ErrorCode::NoOverlap,
                    "agents '" + a.agent + "' and '" + b.agent + "' share no example sets");
    }
    const auto overall = summarize(all);
    report.mean = overall.mean;
    report.sem = overall.sem;
    for (const auto& [length, values] : grouped) {
        report.by_set_length.emplace(length, summarize(values));
    }
    return report;
}

ResponseMatrix predict_matrix(const HypothesisSpace& space, std::span<const ExampleSet> sets,
                              const ModelConfig& config) {
    ResponseMatrix m;
    m.agent = config.label();
    m.domain_max = space.domain_max();
    for (const auto& s : sets) {
        m.rows.emplace(s.id, predict(space, s, config).values);
    }
    return m;
}

DivergenceReport evaluate_model(const HypothesisSpace& space, std::span<const ExampleSet> sets,
                                const ModelConfig& config, const ResponseMatrix& observed,
                                JsdConvention convention) {
    const auto predicted = predict_matrix(space, sets, config);
    return evaluate_pair(observed, predicted, set_lengths(sets), convention);
}

std::vector<LengthRow> report_by_set_length(const DivergenceReport& report,
                                            std::size_t max_length) {
    std::vector<LengthRow> rows;
    for (std::size_t len = 1; len <= max_length; ++len) {
        const auto it = report.by_set_length.find(len);
        rows.push_back({len, it == report.by_set_length.end() ? GroupStats{} : it->second});
    }
    for (const auto& [len, stats] : report.by_set_length) {
        if (len == 0 || len > max_length) {
            rows.push_back({len, stats});
        }
    }
    return rows;
}

nlohmann::json DivergenceReport::to_json() const {
    auto groups = nlohmann::json::array();
    for (const auto& [len, s] : by_set_length) {
        groups.push_back({{"length", len}, {"mean", s.mean}, {"sem", s.sem}, {"count", s.count}});
    }
    auto sets = nlohmann::json::array();
    for (const auto& [id, d] : per_set) {
        sets.push_back({{"set_id", id}, {"set_length", set_length.at(id)}, {"jsd", d}});
    }
    return {{"agent_a", agent_a},
            {"agent_b", agent_b},
            {"convention", to_string(convention)},
            {"mean", mean},
            {"sem", sem},
            {"count", per_set.size()},
            {"zero_sum_vectors", zero_sum_vectors},
            {"by_set_length", std::move(groups)},
            {"per_set", std::move(sets)}};
}

DivergenceReport DivergenceReport::from_json(const nlohmann::json& doc) {
    DivergenceReport r;
    try {
        r.agent_a = doc.at("agent_a").get<std::string>();
        r.agent_b = doc.at("agent_b").get<std::string>();
        r.convention = parse_jsd_convention(doc.at("convention").get<std::string>());
        r.mean = doc.at("mean").get<double>();
        r.sem = doc.at("sem").get<double>();
        r.zero_sum_vectors = doc.value("zero_sum_vectors", std::size_t{0});
        for (const auto& g : doc.at("by_set_length")) {
            r.by_set_length.emplace(g.at("length").get<std::size_t>(),
                                    GroupStats{g.at("mean").get<double>(), g.at("sem").get<double>(),
                                               g.at("count").get<std::size_t>()});
        }
        for (const auto& s : doc.at("per_set")) {
            const auto id = s.at("set_id").get<std::string>();
            r.per_set.emplace(id, s.at("jsd").get<double>());
            r.set_length.emplace(id, s.at("set_length").get<std::size_t>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("divergence report: ") + e.what());
    }
    return r;
}

std::string DivergenceReport::per_set_csv() const {
    std::ostringstream out;
    out << "set_id,set_length,jsd\n";
    for (const auto& [id, d] : per_set) {
        out << id << ',' << set_length.at(id) << ',' << format_double(d) << '\n';
    }
    return out.str();
}

std::string paired_per_set_csv(std::span<const DivergenceReport> reports) {
    std::map<std::string, std::size_t> ids;
    for (const auto& r : reports) {
        ids.insert(r.set_length.begin(), r.set_length.end());
    }
    std::ostringstream out;
    out << "set_id,set_length";
    for (const auto& r : reports) {
        out << ',' << r.agent_a << " vs " << r.agent_b;
    }
    out << '\n';
    for (const auto& [id, len] : ids) {
        out << id << ',' << len;
        for (const auto& r : reports) {
            out << ',';
            const auto it = r.per_set.find(id);
            if (it != r.per_set.end()) {
                out << format_double(it->second);
            }
        }
        out << '\n';
    }
    return out.str();
}

} // namespace numgame
