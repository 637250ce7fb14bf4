#include <gtest/gtest.h>

#include <random>

#include "numgame/evaluation.hpp"
#include "numgame/inference.hpp"
#include "oracle/equivalence.hpp"
#include "support.hpp"

using namespace numgame;

TEST(Oracle, RestrictedSpacesMatchBruteForce) {
    const auto summary = oracle::run_equivalence(2024, 100, 1e-12);
    EXPECT_EQ(summary.cases, 100u);
    EXPECT_GT(summary.comparisons, 600u);
    for (const auto& f : summary.failures) {
        ADD_FAILURE() << f;
    }
    EXPECT_LE(summary.max_abs_error, 1e-12);
}

TEST(Oracle, SecondSeedMatchesBruteForce) {
    const auto summary = oracle::run_equivalence(99, 200, 1e-12);
    EXPECT_TRUE(summary.failures.empty()) << summary.failures.front();
}

TEST(Oracle, ManySeedsMatchBruteForce) {
    // Includes exact prior ties such as lambda = 0.3 over 3 rules and 7 intervals.
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto summary = oracle::run_equivalence(seed, 200, 1e-12);
        ASSERT_TRUE(summary.failures.empty()) << "seed " << seed << ": " << summary.failures.front();
    }
}

TEST(Oracle, FullSpaceAveragingMatchesBruteForce) {
    const auto& space = testing_support::default_space();
    const auto hyps = testing_support::to_oracle(space);
    for (const auto& xs : std::vector<std::vector<int>>{{16}, {2, 8}, {60, 80, 10, 30}, {81, 25, 4, 36}}) {
        const auto x = testing_support::make_set(xs);
        for (double alpha : {1.0, 0.85}) {
            const auto config = ModelConfig::make(0.9, alpha, LikelihoodMode::SizePrinciple,
                                                  InferenceMode::HypothesisAveraging);
            const auto got = predict_averaging(space, x, config).values;
            const auto want = *oracle::predict_avg(hyps, xs, {0.9, alpha, false, 100});
            for (std::size_t i = 0; i < got.size(); ++i) {
                EXPECT_NEAR(got[i], want[i], 1e-12);
            }
        }
    }
}

TEST(Oracle, JsdMatchesBruteForce) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> p(100);
        std::vector<double> q(100);
        for (std::size_t i = 0; i < 100; ++i) {
            p[i] = u(rng) < 0.2 ? 0.0 : u(rng);
            q[i] = u(rng) < 0.2 ? 0.0 : u(rng);
        }
        EXPECT_NEAR(jsd(p, q), oracle::jsd(p, q), 1e-12);
        double mean = 0;
        for (std::size_t i = 0; i < 100; ++i) {
            mean += oracle::bernoulli_jsd(p[i], q[i]) / 100;
        }
        EXPECT_NEAR(jsd(p, q, JsdConvention::PerTargetMean), mean, 1e-12);
    }
}

TEST(Oracle, HandComputedJsdCase) {
    std::vector<double> p(100, 0.0);
    std::vector<double> q(100, 0.0);
    p[0] = 1.0;
    q[0] = 0.5;
    q[1] = 0.5;
    // [log2(4/3) + 0.5 log2(2/3) + 0.5 log2(2)] / 2
    const double by_hand = (std::log2(4.0 / 3.0) + 0.5 * std::log2(2.0 / 3.0) + 0.5) / 2.0;
    EXPECT_NEAR(oracle::jsd(p, q), by_hand, 1e-15);
    EXPECT_NEAR(jsd(p, q), by_hand, 1e-12);
    EXPECT_NEAR(by_hand, 0.311278, 1e-6);
    // 0.2075 is KL(q || m) alone, one of the two averaged terms.
    EXPECT_NEAR(0.5 * std::log2(2.0 / 3.0) + 0.5, 0.2075, 1e-4);
}
