#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "numgame/example_set.hpp"
#include "numgame/hypothesis_space.hpp"
#include "numgame/inference.hpp"

namespace numgame {

/// Normalized: each p(yes) vector becomes a distribution over targets and one
/// base-2 JSD is taken per set. PerTargetMean: mean of the per-target
/// Bernoulli JSDs.
enum class JsdConvention { Normalized, PerTargetMean };

std::string_view to_string(JsdConvention convention) noexcept;
JsdConvention parse_jsd_convention(std::string_view text);

/// Per example set, a p(yes) vector over targets 1..domain_max.
struct ResponseMatrix {
    std::string agent;
    int domain_max = 100;
    std::map<std::string, std::vector<double>> rows;
    std::map<std::string, std::vector<int>> trial_counts; ///< optional, same shape as rows
    std::size_t filled_cells = 0;                         ///< cells imputed on load

    /// Throws Shape / Validation when a row has the wrong length or leaves [0, 1].
    void validate() const;

    friend bool operator==(const ResponseMatrix& a, const ResponseMatrix& b) {
        return a.agent == b.agent && a.domain_max == b.domain_max && a.rows == b.rows &&
               a.trial_counts == b.trial_counts;
    }
};

struct GroupStats {
    double mean = 0.0;
    double sem = 0.0; ///< sample standard deviation / sqrt(count); 0 when count < 2
    std::size_t count = 0;
};

GroupStats summarize(std::span<const double> values);

using SetLengths = std::map<std::string, std::size_t>;
SetLengths set_lengths(std::span<const ExampleSet> sets);

struct DivergenceReport {
    std::string agent_a;
    std::string agent_b;
    JsdConvention convention = JsdConvention::Normalized;
    std::map<std::string, double> per_set;
    std::map<std::string, std::size_t> set_length;
    double mean = 0.0;
    double sem = 0.0;
    std::map<std::size_t, GroupStats> by_set_length;
    std::size_t zero_sum_vectors = 0; ///< all-zero vectors replaced by uniform

    [[nodiscard]] nlohmann::json to_json() const;
    static DivergenceReport from_json(const nlohmann::json& doc);
    /// set_id,set_length,jsd
    [[nodiscard]] std::string per_set_csv() const;
};

/// Jensen-Shannon divergence in bits, clamped to [0, 1]. When `zero_sum` is
/// given it is incremented for every all-zero input replaced by uniform.
double jsd(std::span<const double> p, std::span<const double> q,
           JsdConvention convention = JsdConvention::Normalized, std::size_t* zero_sum = nullptr);

/// Per-set JSD over the set ids shared by `a` and `b`, grouped by set length.
DivergenceReport evaluate_pair(const ResponseMatrix& a, const ResponseMatrix& b,
                               const SetLengths& lengths,
                               JsdConvention convention = JsdConvention::Normalized);

/// Runs the model on every set; the matrix is tagged with config.label().
ResponseMatrix predict_matrix(const HypothesisSpace& space, std::span<const ExampleSet> sets,
                              const ModelConfig& config);

DivergenceReport evaluate_model(const HypothesisSpace& space, std::span<const ExampleSet> sets,
                                const ModelConfig& config, const ResponseMatrix& observed,
                                JsdConvention convention = JsdConvention::Normalized);

struct LengthRow {
    std::size_t length = 0;
    GroupStats stats;
};

/// One row per length 1..max_length (empty groups have count 0), plus any
/// longer lengths present in the report.
std::vector<LengthRow> report_by_set_length(const DivergenceReport& report,
                                            std::size_t max_length = 4);

/// set_id,set_length, then one JSD column per report. Missing cells are blank.
std::string paired_per_set_csv(std::span<const DivergenceReport> reports);

} // namespace numgame
