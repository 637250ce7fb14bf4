#include <gtest/gtest.h>

#include <cmath>

#include "numgame/error.hpp"
#include "numgame/evaluation.hpp"
#include "support.hpp"

using namespace numgame;
using testing_support::make_set;

namespace {

ResponseMatrix matrix(const std::string& agent, std::map<std::string, std::vector<double>> rows,
                      int n = 4) {
    ResponseMatrix m;
    m.agent = agent;
    m.domain_max = n;
    m.rows = std::move(rows);
    return m;
}

} // namespace

TEST(Jsd, IdentityIsZero) {
    const std::vector<double> p{0.2, 0.9, 0.0, 1.0};
    EXPECT_EQ(jsd(p, p), 0.0);
    EXPECT_EQ(jsd(p, p, JsdConvention::PerTargetMean), 0.0);
}

TEST(Jsd, DisjointPointMassesSaturate) {
    EXPECT_EQ(jsd(std::vector<double>{1, 0, 0}, std::vector<double>{0, 1, 0}), 1.0);
    EXPECT_EQ(jsd(std::vector<double>{1, 1}, std::vector<double>{0, 0}, JsdConvention::PerTargetMean),
              1.0);
}

TEST(Jsd, ScaleInvariantUnderNormalization) {
    const std::vector<double> p{0.1, 0.5, 0.9, 0.3};
    const std::vector<double> q{0.4, 0.4, 0.2, 0.0};
    std::vector<double> scaled = p;
    for (double& v : scaled) {
        v *= 0.25;
    }
    EXPECT_NEAR(jsd(scaled, q), jsd(p, q), 1e-15);
}

TEST(Jsd, ZeroSumBecomesUniformAndIsCounted) {
    std::size_t zero = 0;
    const std::vector<double> none{0, 0, 0, 0};
    const std::vector<double> flat{0.5, 0.5, 0.5, 0.5};
    EXPECT_NEAR(jsd(none, flat, JsdConvention::Normalized, &zero), 0.0, 1e-15);
    EXPECT_EQ(zero, 1u);
}

TEST(Jsd, RejectsBadInputs) {
    const auto code = [](auto f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Io;
    };
    EXPECT_EQ(code([] { (void)jsd(std::vector<double>{1, 0}, std::vector<double>{1}); }), ErrorCode::Shape);
    EXPECT_EQ(code([] { (void)jsd(std::vector<double>{-0.1, 1}, std::vector<double>{1, 0}); }),
              ErrorCode::NegativeEntry);
    EXPECT_EQ(code([] { (void)jsd(std::vector<double>{NAN, 1}, std::vector<double>{1, 0}); }),
              ErrorCode::NegativeEntry);
    EXPECT_EQ(code([] {
                  (void)jsd(std::vector<double>{1.5, 1}, std::vector<double>{1, 0},
                            JsdConvention::PerTargetMean);
              }),
              ErrorCode::Validation);
    EXPECT_THROW((void)parse_jsd_convention("other"), Error);
}

TEST(Summarize, SampleStandardError) {
    const std::vector<double> v{1, 2, 3, 4};
    const auto s = summarize(v);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_NEAR(s.sem, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
    EXPECT_EQ(s.count, 4u);
    EXPECT_EQ(summarize(std::vector<double>{7}).sem, 0.0);
    EXPECT_EQ(summarize(std::vector<double>{}).count, 0u);
}

TEST(EvaluatePair, IntersectionAndGroups) {
    const auto a = matrix("a", {{"s1", {1, 0, 0, 0}}, {"s2", {0.5, 0.5, 0, 0}}, {"only_a", {1, 1, 1, 1}}});
    const auto b = matrix("b", {{"s1", {0, 1, 0, 0}}, {"s2", {0.5, 0.5, 0, 0}}, {"only_b", {1, 1, 1, 1}}});
    const SetLengths lengths{{"s1", 1}, {"s2", 2}, {"only_a", 1}, {"only_b", 3}};
    const auto r = evaluate_pair(a, b, lengths);
    EXPECT_EQ(r.per_set.size(), 2u);
    EXPECT_EQ(r.per_set.at("s1"), 1.0);
    EXPECT_EQ(r.per_set.at("s2"), 0.0);
    EXPECT_DOUBLE_EQ(r.mean, 0.5);
    EXPECT_EQ(r.by_set_length.at(1).count, 1u);
    EXPECT_EQ(r.by_set_length.at(2).mean, 0.0);

    // Group means recombine to the overall mean.
    double weighted = 0;
    for (const auto& [len, g] : r.by_set_length) {
        weighted += g.mean * static_cast<double>(g.count);
    }
    EXPECT_NEAR(weighted / static_cast<double>(r.per_set.size()), r.mean, 1e-12);
}

TEST(EvaluatePair, Errors) {
    const auto a = matrix("a", {{"s1", {1, 0, 0, 0}}});
    const auto b = matrix("b", {{"s2", {1, 0, 0, 0}}});
    try {
        (void)evaluate_pair(a, b, {{"s1", 1}, {"s2", 1}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoOverlap);
    }
    try {
        (void)evaluate_pair(a, a, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Validation);
    }
    const auto wide = matrix("w", {{"s1", {1, 0, 0, 0, 0}}}, 5);
    EXPECT_THROW((void)evaluate_pair(a, wide, {{"s1", 1}}), Error);
}

TEST(EvaluatePair, SelfComparisonIsZero) {
    const auto& space = testing_support::default_space();
    const auto& sets = testing_support::standin_sets();
    const auto m = predict_matrix(space, sets, ModelConfig::human_best_fit());
    const auto r = evaluate_pair(m, m, set_lengths(sets));
    EXPECT_EQ(r.mean, 0.0);
    for (const auto& row : report_by_set_length(r)) {
        EXPECT_EQ(row.stats.mean, 0.0);
    }
}

TEST(EvaluateModel, OwnGeneratingConfigIsZero) {
    const auto& space = testing_support::default_space();
    const std::vector<ExampleSet> sets{make_set({16}), make_set({2, 8}), make_set({10, 20, 30})};
    const auto config = ModelConfig::make(0.7, 0.9, LikelihoodMode::SizePrinciple, InferenceMode::MAP);
    const auto observed = predict_matrix(space, sets, config);
    EXPECT_EQ(observed.agent, config.label());
    EXPECT_EQ(evaluate_model(space, sets, config, observed).mean, 0.0);
}

TEST(Report, JsonRoundTripAndCsv) {
    const auto a = matrix("a", {{"s1", {1, 0, 0, 0}}, {"s2", {0.2, 0.5, 0, 0}}});
    const auto b = matrix("b", {{"s1", {0, 1, 0, 0}}, {"s2", {0.5, 0.5, 0, 0}}});
    const auto r = evaluate_pair(a, b, {{"s1", 1}, {"s2", 2}}, JsdConvention::PerTargetMean);
    const auto back = DivergenceReport::from_json(r.to_json());
    EXPECT_EQ(back.per_set, r.per_set);
    EXPECT_EQ(back.mean, r.mean);
    EXPECT_EQ(back.convention, JsdConvention::PerTargetMean);
    const auto csv = r.per_set_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "set_id,set_length,jsd");
    EXPECT_NE(csv.find("s1,1,"), std::string::npos);
}

TEST(Report, ByLengthHasRowsOneToFour) {
    const auto a = matrix("a", {{"s1", {1, 0, 0, 0}}});
    const auto r = evaluate_pair(a, a, {{"s1", 3}});
    const auto rows = report_by_set_length(r);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].stats.count, 0u);
    EXPECT_EQ(rows[2].stats.count, 1u);
}

TEST(Report, PairedPerSetColumns) {
    const auto a = matrix("human", {{"s1", {1, 0, 0, 0}}, {"s2", {1, 1, 0, 0}}});
    const auto b = matrix("bayes", {{"s1", {0, 1, 0, 0}}, {"s2", {1, 1, 0, 0}}});
    const auto c = matrix("gpt", {{"s1", {1, 0, 0, 0}}});
    const SetLengths lengths{{"s1", 1}, {"s2", 2}};
    const std::vector<DivergenceReport> reports{evaluate_pair(a, b, lengths), evaluate_pair(c, b, lengths)};
    const auto csv = paired_per_set_csv(reports);
    EXPECT_EQ(csv, "set_id,set_length,human vs bayes,gpt vs bayes\ns1,1,1,1\ns2,2,0,\n");
}
