#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "numgame/evaluation.hpp"
#include "numgame/example_set.hpp"

namespace numgame {

// ---------------------------------------------------------------------------
// Example sets
// ---------------------------------------------------------------------------

struct ExampleSetFile {
    std::vector<ExampleSet> sets;
    std::vector<std::string> warnings;
};

/// Accepts either a JSON array of {id?, examples, concept?} or a manifest
/// object with an "example_sets" member. Missing ids become canonical ids;
/// repeated ids keep the first entry.
ExampleSetFile example_sets_from_json(const nlohmann::json& doc, int domain_max = 100);
ExampleSetFile load_example_sets(const std::filesystem::path& path, int domain_max = 100);

nlohmann::json example_sets_to_json(std::span<const ExampleSet> sets);
void save_example_sets(const std::filesystem::path& path, std::span<const ExampleSet> sets);

// ---------------------------------------------------------------------------
// Response matrices (CSV: set_id,target,p_yes[,n_trials])
// ---------------------------------------------------------------------------

enum class MissingCellPolicy { SetMean, Zero, DropSet };

MissingCellPolicy parse_missing_cell_policy(std::string_view text);

struct MatrixLoadOptions {
    int domain_max = 100;
    MissingCellPolicy missing = MissingCellPolicy::SetMean;
};

ResponseMatrix read_response_matrix(std::istream& in, const std::string& agent,
                                    const MatrixLoadOptions& options = {},
                                    std::vector<std::string>* warnings = nullptr);
ResponseMatrix load_response_matrix(const std::filesystem::path& path, const std::string& agent,
                                    const MatrixLoadOptions& options = {},
                                    std::vector<std::string>* warnings = nullptr);

/// Rows in set-id order, targets ascending. n_trials is written when present.
void write_response_matrix(std::ostream& out, const ResponseMatrix& matrix);
void save_response_matrix(const std::filesystem::path& path, const ResponseMatrix& matrix);

/// Fills cells that have no observation (NaN) per policy; returns the number filled.
std::size_t fill_missing_cells(ResponseMatrix& matrix, MissingCellPolicy policy,
                               std::vector<std::string>* warnings = nullptr);

// ---------------------------------------------------------------------------
// Synthetic concept datasets
// ---------------------------------------------------------------------------

enum class BaseCategory { All, Even, Odd, Square, Cube, Prime };

std::string_view to_string(BaseCategory base) noexcept;
BaseCategory parse_base_category(std::string_view text);
std::vector<int> base_members(BaseCategory base, int domain_max);

struct TransformStep {
    enum class Op { Identity, Multiply, Add, Square, Exp2 };
    Op op = Op::Identity;
    long long k = 0;

    friend bool operator==(const TransformStep&, const TransformStep&) = default;
};

/// Steps applied left to right, e.g. [Exp2, Add 1] is n -> 2^n + 1.
struct Transform {
    std::string id;
    std::vector<TransformStep> steps;

    [[nodiscard]] std::optional<long long> apply(long long n) const;
    [[nodiscard]] std::string description() const;

    friend bool operator==(const Transform&, const Transform&) = default;
};

std::vector<Transform> default_transforms();
std::vector<Transform> transforms_from_json(const nlohmann::json& doc);
nlohmann::json transforms_to_json(std::span<const Transform> transforms);

struct ConceptSpec {
    std::string id;
    BaseCategory base = BaseCategory::All;
    Transform transform;
    std::vector<int> full_extension;

    [[nodiscard]] std::string label() const;

    friend bool operator==(const ConceptSpec&, const ConceptSpec&) = default;
};

/// transform(base) clipped to 1..domain_max, sorted and deduplicated.
ConceptSpec make_concept(BaseCategory base, const Transform& transform, int domain_max = 100);

struct GenerationOptions {
    std::vector<BaseCategory> bases{BaseCategory::All,    BaseCategory::Even, BaseCategory::Odd,
                                    BaseCategory::Square, BaseCategory::Cube, BaseCategory::Prime};
    std::vector<Transform> transforms = default_transforms();
    std::size_t concept_count = 79;
    std::size_t set_count = 255;
    std::size_t max_set_length = 4;
    int domain_max = 100;
    std::uint64_t seed = 7;
};

struct DatasetManifest {
    std::uint64_t seed = 0;
    int domain_max = 100;
    std::vector<ConceptSpec> concepts;
    std::vector<ExampleSet> example_sets;

    [[nodiscard]] std::map<std::size_t, std::size_t> counts_by_length() const;
    [[nodiscard]] nlohmann::json to_json() const;
    static DatasetManifest from_json(const nlohmann::json& doc);

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Every base x transform concept, extensionally deduplicated and non-empty,
/// in (base, transform) order.
std::vector<ConceptSpec> candidate_concepts(const GenerationOptions& options);

/// Samples concepts, then distinct example sets drawn without replacement
/// from their concepts. Throws Capacity when the request cannot be met.
DatasetManifest generate_dataset(const GenerationOptions& options);

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Writes `doc` with two-space indentation and a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace numgame
