#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "numgame/evaluation.hpp"
#include "numgame/inference.hpp"

namespace numgame::cli {

enum ExitCode : int {
    kOk = 0,
    kUnexpected = 1,
    kValidation = 2,
    kComputation = 3,
    kIo = 4,
};

/// Resolves model flags. A fixed preset (baseline, human-fit, gpt-fit) may not
/// be combined with lambda/alpha; an explicit likelihood or mode overrides
/// the preset's variant.
ModelConfig resolve_model(const std::optional<std::string>& preset,
                          const std::optional<double>& lambda,
                          const std::optional<double>& alpha,
                          const std::optional<std::string>& likelihood,
                          const std::optional<std::string>& mode, int domain_max);

/// A compare/figure source: "[name=]path.csv" or "[name=]model:spec", where
/// spec is a comma list like "map,lambda=0.9,alpha=0.85" or
/// "lambda=0.7,alpha=0.9,likelihood=binary,mode=avg".
struct SourceSpec {
    std::string name;
    std::optional<std::string> path;
    std::optional<ModelConfig> model;
};

SourceSpec parse_source(const std::string& text, int domain_max);

/// Parses "1-100", "2,4,8" or mixes such as "1-10,50".
std::vector<int> parse_targets(const std::string& text, int domain_max);

/// Runs the command line; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace numgame::cli
