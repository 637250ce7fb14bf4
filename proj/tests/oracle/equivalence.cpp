#include "equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "brute_force.hpp"
#include "numgame/error.hpp"
#include "numgame/hypothesis_space.hpp"
#include "numgame/inference.hpp"

namespace oracle {

namespace {

using numgame::ErrorCode;
using numgame::HypothesisSpace;
using numgame::InferenceMode;
using numgame::LikelihoodMode;
using numgame::ModelConfig;

template <class F>
auto attempt(F&& f) -> std::optional<decltype(f())> {
    try {
        return f();
    } catch (const numgame::Error& e) {
        if (e.code() == ErrorCode::ZeroEvidence || e.code() == ErrorCode::EmptySupport) {
            return std::nullopt;
        }
        throw;
    }
}

} // namespace

EquivalenceSummary run_equivalence(std::uint64_t seed, std::size_t cases, double tolerance) {
    static const auto full = HypothesisSpace::build(100, numgame::default_rule_registry());
    std::mt19937_64 rng(seed);
    const auto pick = [&rng](std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    };
    const double lambdas[] = {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
    const double alphas[] = {0.5, 0.7, 0.85, 0.9, 0.99, 1.0};

    EquivalenceSummary summary;
    for (std::size_t c = 0; c < cases; ++c) {
        // Mix rules and intervals so both prior components are exercised.
        const auto k = 1 + pick(10);
        std::set<std::size_t> chosen;
        while (chosen.size() < k) {
            chosen.insert(pick(3) == 0 ? pick(full.rule_count()) : pick(full.size()));
        }
        std::vector<numgame::Hypothesis> hyps;
        for (auto i : chosen) {
            hyps.push_back(full[i]);
        }
        const auto space = HypothesisSpace::from_hypotheses(100, hyps);
        std::vector<Hyp> ohyps;
        for (const auto& h : hyps) {
            ohyps.push_back({{h.extension.begin(), h.extension.end()},
                             h.kind == numgame::HypothesisKind::Rule});
        }

        numgame::ExampleSet x;
        const auto n = 1 + pick(4);
        const auto& source = hyps[pick(hyps.size())].extension;
        const bool consistent = pick(4) != 0;
        for (std::size_t i = 0; i < n; ++i) {
            x.examples.push_back(consistent ? source[pick(source.size())]
                                            : static_cast<int>(1 + pick(100)));
        }
        x.id = "case" + std::to_string(c);

        const double lambda = lambdas[pick(std::size(lambdas))];
        const double alpha = alphas[pick(std::size(alphas))];

        for (auto mode : {LikelihoodMode::SizePrinciple, LikelihoodMode::Binary}) {
            const Model m{lambda, alpha, mode == LikelihoodMode::Binary, 100};
            std::ostringstream tag;
            tag << "case " << c << " k=" << k << " lambda=" << lambda << " alpha=" << alpha
                << " mode=" << numgame::to_string(mode) << ": ";
            const auto fail = [&](const std::string& what) {
                summary.failures.push_back(tag.str() + what);
            };
            const auto compare = [&](const std::string& what, const std::vector<double>& got,
                                     const std::vector<double>& want) {
                ++summary.comparisons;
                if (got.size() != want.size()) {
                    fail(what + " length mismatch");
                    return;
                }
                for (std::size_t i = 0; i < got.size(); ++i) {
                    const double err = std::abs(got[i] - want[i]);
                    summary.max_abs_error = std::max(summary.max_abs_error, err);
                    if (!(err <= tolerance)) {
                        fail(what + " differs at " + std::to_string(i) + " by " + std::to_string(err));
                        return;
                    }
                }
            };

            const auto avg_cfg = ModelConfig::make(lambda, alpha, mode, InferenceMode::HypothesisAveraging);
            const auto map_cfg = ModelConfig::make(lambda, alpha, mode, InferenceMode::MAP);
            const auto maxl_cfg = ModelConfig::make(lambda, alpha, mode, InferenceMode::MaxLikelihood);

            const auto post = attempt([&] { return numgame::posterior(space, x, avg_cfg).weights; });
            const auto want_post = posterior(ohyps, x.examples, m);
            if (post.has_value() != want_post.has_value()) {
                fail("posterior feasibility differs");
            } else if (post) {
                compare("posterior", *post, *want_post);
            } else {
                ++summary.zero_evidence;
            }

            const auto avg = attempt([&] { return numgame::predict_averaging(space, x, avg_cfg).values; });
            const auto want_avg = predict_avg(ohyps, x.examples, m);
            if (avg.has_value() != want_avg.has_value()) {
                fail("averaging feasibility differs");
            } else if (avg) {
                compare("averaging", *avg, *want_avg);
            }

            for (bool use_prior : {true, false}) {
                const auto& cfg = use_prior ? map_cfg : maxl_cfg;
                const auto what = std::string(use_prior ? "map" : "maxl");
                const auto got = attempt([&] { return numgame::predict(space, x, cfg).values; });
                const auto idx = select(ohyps, x.examples, m, use_prior);
                if (got.has_value() != idx.has_value()) {
                    fail(what + " feasibility differs");
                } else if (got) {
                    compare(what, *got, predict_single(ohyps[*idx], m));
                }
            }
        }
        ++summary.cases;
    }
    return summary;
}

} // namespace oracle
