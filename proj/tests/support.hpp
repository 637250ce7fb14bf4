#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "numgame/dataset.hpp"
#include "numgame/example_set.hpp"
#include "numgame/hypothesis_space.hpp"
#include "oracle/brute_force.hpp"

namespace testing_support {

inline numgame::ExampleSet make_set(std::vector<int> xs, std::string id = "") {
    numgame::ExampleSet s;
    s.id = id.empty() ? numgame::canonical_set_id(xs) : std::move(id);
    s.examples = std::move(xs);
    return s;
}

inline std::vector<oracle::Hyp> to_oracle(const numgame::HypothesisSpace& space) {
    std::vector<oracle::Hyp> out;
    for (const auto& h : space.hypotheses()) {
        out.push_back({{h.extension.begin(), h.extension.end()},
                       h.kind == numgame::HypothesisKind::Rule});
    }
    return out;
}

/// The default generated 255-set stand-in corpus.
inline const std::vector<numgame::ExampleSet>& standin_sets() {
    static const auto sets = numgame::generate_dataset({}).example_sets;
    return sets;
}

inline const numgame::HypothesisSpace& default_space() {
    static const auto space = numgame::HypothesisSpace::build(100, numgame::default_rule_registry());
    return space;
}

/// Fresh, empty directory under the system temp path.
inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("numgame_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testing_support
