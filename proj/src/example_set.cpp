#include "numgame/example_set.hpp"

#include <algorithm>

#include "numgame/error.hpp"

namespace numgame {

std::string canonical_set_id(std::span<const int> examples) {
    std::vector<int> sorted(examples.begin(), examples.end());
    std::sort(sorted.begin(), sorted.end());
    std::string id = "L" + std::to_string(sorted.size()) + ":";
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0) {
            id += '-';
        }
        id += std::to_string(sorted[i]);
    }
    return id;
}

void validate_example_set(const ExampleSet& set, int domain_max) {
    if (set.examples.empty()) {
        throw Error(ErrorCode::Validation, "example set '" + set.id + "' has no examples");
    }
    for (int x : set.examples) {
        if (x < 1 || x > domain_max) {
            throw Error(ErrorCode::Validation, "example set '" + set.id + "' contains " +
                                                   std::to_string(x) + ", outside 1.." +
                                                   std::to_string(domain_max));
        }
    }
}

} // namespace numgame
