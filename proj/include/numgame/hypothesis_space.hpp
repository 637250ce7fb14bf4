#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace numgame {

enum class HypothesisKind { Rule, Interval };

std::string_view to_string(HypothesisKind kind) noexcept;

/// One candidate concept: a labeled, sorted, duplicate-free subset of 1..N.
struct Hypothesis {
    std::string id;
    std::string label;
    HypothesisKind kind = HypothesisKind::Rule;
    std::vector<int> extension;

    [[nodiscard]] std::size_t size() const noexcept { return extension.size(); }
    [[nodiscard]] bool contains(int y) const noexcept;
    [[nodiscard]] bool contains_all(std::span<const int> xs) const noexcept;

    friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

enum class RuleKind { Predicate, Multiples, Powers, EndsIn };

/// Registry entry describing how to generate one rule concept.
///
/// `Predicate` uses `predicate` (all_numbers, even, odd, square, cube, prime);
/// `Multiples` uses `parameter` as the factor; `Powers` uses `parameter` as the
/// base and skips base^0 unless `include_zero_exponent`; `EndsIn` uses
/// `parameter` as the final decimal digit.
struct RuleSpec {
    std::string id;
    std::string label;
    RuleKind kind = RuleKind::Predicate;
    std::string predicate;
    int parameter = 0;
    bool include_zero_exponent = false;

    friend bool operator==(const RuleSpec&, const RuleSpec&) = default;
};

using RuleRegistry = std::vector<RuleSpec>;

/// Generates the registry entry's members within 1..domain_max (may be empty).
std::vector<int> rule_extension(const RuleSpec& rule, int domain_max);

/// all_numbers, even, odd, square, cube, prime, multiples_of_3..12,
/// powers_of_2..10, ends_in_0..9 (35 entries before deduplication).
RuleRegistry default_rule_registry();

RuleRegistry rule_registry_from_json(const nlohmann::json& doc);
nlohmann::json rule_registry_to_json(const RuleRegistry& registry);
RuleRegistry load_rule_registry(const std::filesystem::path& path);

/// Every interval {a..b} with 1 <= a <= b <= domain_max, ordered by (a, b).
std::vector<Hypothesis> build_interval_concepts(int domain_max);

/// Rule hypotheses clipped to the domain. Empty rules are dropped and rules
/// whose extension repeats an earlier entry are removed.
std::vector<Hypothesis> build_rule_concepts(int domain_max, const RuleRegistry& registry);

class HypothesisSpace {
  public:
    /// Rules (registry order) followed by intervals ordered by (a, b).
    static HypothesisSpace build(int domain_max, const RuleRegistry& registry);

    /// Arbitrary hypotheses in the given order; used for restricted spaces.
    static HypothesisSpace from_hypotheses(int domain_max, std::vector<Hypothesis> hypotheses);

    [[nodiscard]] int domain_max() const noexcept { return domain_max_; }
    [[nodiscard]] std::size_t size() const noexcept { return hypotheses_.size(); }
    [[nodiscard]] std::size_t rule_count() const noexcept { return rule_count_; }
    [[nodiscard]] std::size_t interval_count() const noexcept { return interval_count_; }
    [[nodiscard]] const std::vector<Hypothesis>& hypotheses() const noexcept { return hypotheses_; }
    [[nodiscard]] const Hypothesis& operator[](std::size_t i) const { return hypotheses_.at(i); }

    /// Indices of the hypotheses whose extension contains y.
    [[nodiscard]] std::span<const std::size_t> hypotheses_containing(int y) const;

    /// Index of the hypothesis with the given id, or size() if absent.
    [[nodiscard]] std::size_t find(std::string_view id) const noexcept;

    [[nodiscard]] nlohmann::json to_json() const;

  private:
    HypothesisSpace() = default;
    void index();

    int domain_max_ = 0;
    std::vector<Hypothesis> hypotheses_;
    std::vector<std::vector<std::size_t>> membership_;
    std::size_t rule_count_ = 0;
    std::size_t interval_count_ = 0;
};

} // namespace numgame
