#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace numgame {

/// Observed examples X. Duplicates are kept; each counts toward n.
struct ExampleSet {
    std::string id;
    std::vector<int> examples;
    std::optional<std::string> source_concept;

    [[nodiscard]] std::size_t length() const noexcept { return examples.size(); }

    friend bool operator==(const ExampleSet&, const ExampleSet&) = default;
};

/// "L<n>:" followed by the sorted examples joined with '-', e.g. "L2:2-8".
std::string canonical_set_id(std::span<const int> examples);

/// Throws Validation when X is empty or has a member outside 1..domain_max.
void validate_example_set(const ExampleSet& set, int domain_max);

} // namespace numgame
