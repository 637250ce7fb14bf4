#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>

#include "mock_endpoint.hpp"
#include "numgame/error.hpp"
#include "numgame/llm_harness.hpp"
#include "support.hpp"

using namespace numgame;
using namespace numgame::llm;
using testing_support::make_set;
using testing_support::MockEndpoint;
using testing_support::MockReply;

namespace {

HttpChatClient client_for(const MockEndpoint& server, AuthScheme auth = AuthScheme::None,
                          std::string key = "") {
    HttpClientOptions options;
    options.endpoint = server.url();
    options.model = "mock";
    options.auth = auth;
    options.api_key = std::move(key);
    options.timeout = std::chrono::seconds(5);
    return HttpChatClient(options);
}

QueryJob small_job() {
    QueryJob job;
    job.sets = {make_set({2, 8}), make_set({15})};
    job.targets = {1, 2, 3, 16};
    job.trials = 2;
    job.max_parallel = 3;
    job.retry.base_backoff = std::chrono::milliseconds(1);
    job.retry.max_backoff = std::chrono::milliseconds(2);
    return job;
}

} // namespace

TEST(Prompt, DefaultTemplate) {
    EXPECT_EQ(build_prompt(kDefaultPromptTemplate, make_set({2, 8}), 16),
              "Here is a set of numbers that share a common mathematical concept: 2, 8. "
              "Does the number 16 belong to the same concept? Answer only yes or no.");
    EXPECT_EQ(build_prompt("{examples}|{target}|{target}", make_set({8, 2}), 3), "8, 2|3|3");
    try {
        (void)build_prompt("no slots {target}", make_set({1}), 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Template);
    }
}

TEST(Prompt, ParseResponse) {
    EXPECT_EQ(parse_response("Yes."), Answer::Yes);
    EXPECT_EQ(parse_response("  **NO**"), Answer::No);
    EXPECT_EQ(parse_response("no, it does not"), Answer::No);
    EXPECT_EQ(parse_response("It depends"), Answer::Invalid);
    EXPECT_EQ(parse_response("Yesterday"), Answer::Invalid);
    EXPECT_EQ(parse_response(""), Answer::Invalid);
}

TEST(Job, PlanSizeAndValidation) {
    QueryJob job;
    job.sets = testing_support::standin_sets();
    EXPECT_EQ(job.planned_queries(), 255000u);
    job.targets = {0};
    EXPECT_THROW(job.validate(), Error);
    job.targets = {};
    job.trials = 0;
    EXPECT_THROW(job.validate(), Error);
}

TEST(Retry, BackoffDoublesUpToCap) {
    RetryPolicy p;
    p.base_backoff = std::chrono::milliseconds(100);
    p.max_backoff = std::chrono::milliseconds(350);
    EXPECT_EQ(p.delay_after(1).count(), 100);
    EXPECT_EQ(p.delay_after(2).count(), 200);
    EXPECT_EQ(p.delay_after(3).count(), 350);
}

TEST(Http, SplitEndpointAndExtract) {
    EXPECT_EQ(HttpChatClient::split_endpoint("https://api.example.com/v1/chat/completions"),
              std::make_pair(std::string("https://api.example.com"), std::string("/v1/chat/completions")));
    EXPECT_EQ(HttpChatClient::split_endpoint("http://localhost:8080").second, "/v1/chat/completions");
    EXPECT_EQ(extract_reply_text(nlohmann::json::parse(R"({"choices":[{"message":{"content":"Yes"}}]})")),
              "Yes");
    EXPECT_FALSE(extract_reply_text(nlohmann::json::parse(R"({"choices":[]})")).has_value());
}

TEST(Harness, AlwaysYesGivesOnes) {
    MockEndpoint server([](const std::string&, const httplib::Request&) { return MockReply{200, "Yes"}; });
    auto client = client_for(server);
    const auto job = small_job();
    const auto result = run_job(job, client);
    EXPECT_FALSE(result.partial);
    EXPECT_EQ(result.records.size(), 16u);
    EXPECT_EQ(server.requests(), 16u);
    for (const auto& [id, row] : result.matrix.rows) {
        EXPECT_EQ(row[0], 1.0);
        EXPECT_EQ(row[15], 1.0);
        EXPECT_EQ(result.matrix.trial_counts.at(id)[1], 2);
    }
}

TEST(Harness, RetriesTransientAndInvalid) {
    std::atomic<int> calls{0};
    MockEndpoint server([&](const std::string&, const httplib::Request&) {
        const int n = calls++;
        if (n % 3 == 0) {
            return MockReply{503, "busy"};
        }
        if (n % 3 == 1) {
            return MockReply{200, "maybe"};
        }
        return MockReply{200, "No"};
    });
    auto client = client_for(server);
    auto job = small_job();
    job.max_parallel = 1;
    job.trials = 1;
    job.sets.resize(1);
    job.targets = {5};
    const auto result = run_job(job, client);
    ASSERT_EQ(result.records.size(), 1u);
    EXPECT_EQ(result.records[0].parsed, Answer::No);
    EXPECT_EQ(result.records[0].attempt_count, 3);
    EXPECT_EQ(result.matrix.rows.begin()->second[4], 0.0);
}

TEST(Harness, InvalidAfterAllAttemptsIsRecorded) {
    MockEndpoint server([](const std::string&, const httplib::Request&) { return MockReply{200, "Perhaps"}; });
    auto client = client_for(server);
    auto job = small_job();
    job.retry.max_attempts = 2;
    job.targets = {1};
    const auto result = run_job(job, client);
    for (const auto& r : result.records) {
        EXPECT_EQ(r.parsed, Answer::Invalid);
        EXPECT_EQ(r.attempt_count, 2);
    }
    EXPECT_EQ(server.requests(), 8u);
}

TEST(Harness, AuthFailureStops) {
    MockEndpoint server([](const std::string&, const httplib::Request&) { return MockReply{401, "nope"}; });
    auto client = client_for(server);
    try {
        (void)run_job(small_job(), client);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Auth);
    }
    EXPECT_LE(server.requests(), 3u);
}

TEST(Harness, BudgetYieldsPartialThenResumes) {
    MockEndpoint server([](const std::string& prompt, const httplib::Request&) {
        return MockReply{200, MockEndpoint::target_of(prompt) % 2 == 0 ? "Yes" : "No"};
    });
    auto client = client_for(server);
    const auto dir = testing_support::temp_dir("resume");
    const auto log = dir / "trials.jsonl";
    auto job = small_job();
    job.max_requests = 5;
    const auto first = run_job(job, client, log);
    EXPECT_TRUE(first.partial);
    EXPECT_EQ(first.requests_sent, 5u);
    EXPECT_EQ(load_trial_log(log).size(), first.records.size());

    job.max_requests.reset();
    const auto second = run_job(job, client, log);
    EXPECT_FALSE(second.partial);
    EXPECT_EQ(second.resumed_records, first.records.size());
    EXPECT_EQ(second.requests_sent, 16u - first.records.size());
    EXPECT_EQ(load_trial_log(log).size(), 16u);
    const auto& row = second.matrix.rows.at("L2:2-8");
    EXPECT_EQ(row[1], 1.0);
    EXPECT_EQ(row[2], 0.0);
    EXPECT_EQ(row[15], 1.0);
}

TEST(Harness, AuthHeaders) {
    MockEndpoint server([](const std::string&, const httplib::Request&) { return MockReply{200, "Yes"}; });
    auto bearer = client_for(server, AuthScheme::Bearer, "secret");
    EXPECT_EQ(bearer.complete("p").status, ChatReply::Status::Ok);
    const auto headers = server.last_headers();
    ASSERT_EQ(headers.count("Authorization"), 1u);
    EXPECT_EQ(headers.find("Authorization")->second, "Bearer secret");

    HttpClientOptions options;
    options.endpoint = server.url();
    options.model = "mock";
    options.auth = AuthScheme::Header;
    options.auth_header = "api-key";
    options.api_key = "k2";
    HttpChatClient custom(options);
    EXPECT_EQ(custom.complete("p").text, "Yes");
    const auto custom_headers = server.last_headers();
    EXPECT_EQ(custom_headers.find("api-key")->second, "k2");
    EXPECT_EQ(custom_headers.count("Authorization"), 0u);
}

TEST(Harness, StatusMapping) {
    MockEndpoint server([](const std::string& prompt, const httplib::Request&) {
        if (prompt == "bad") {
            return MockReply{400, "bad request"};
        }
        if (prompt == "garbled") {
            return MockReply{200, "", std::string("not json")};
        }
        return MockReply{429, "slow down"};
    });
    auto client = client_for(server);
    EXPECT_EQ(client.complete("bad").status, ChatReply::Status::Fatal);
    EXPECT_EQ(client.complete("garbled").status, ChatReply::Status::Transient);
    EXPECT_EQ(client.complete("x").status, ChatReply::Status::Transient);
}

TEST(Harness, ApiKeyFromEnvironment) {
    ::setenv("NUMGAME_TEST_KEY", "abc", 1);
    EXPECT_EQ(api_key_from_env("NUMGAME_TEST_KEY"), "abc");
    ::unsetenv("NUMGAME_TEST_KEY");
    try {
        (void)api_key_from_env("NUMGAME_TEST_KEY");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Auth);
    }
}

TEST(Harness, AggregateTrials) {
    const std::vector<ExampleSet> sets{make_set({1}), make_set({2})};
    std::vector<TrialRecord> records{
        {"L1:1", 1, 0, "Yes", Answer::Yes, 0, 1},     {"L1:1", 1, 1, "No", Answer::No, 0, 1},
        {"L1:1", 2, 0, "Yes", Answer::Yes, 0, 1},     {"L1:1", 3, 0, "hm", Answer::Invalid, 0, 1},
    };
    const auto m = aggregate_trials(records, sets, 3, "a");
    EXPECT_EQ(m.rows.at("L1:1"), (std::vector<double>{0.5, 1.0, 0.75}));
    EXPECT_EQ(m.trial_counts.at("L1:1"), (std::vector<int>{2, 1, 0}));
    EXPECT_EQ(m.rows.count("L1:2"), 0u);
    const auto round = TrialRecord::from_json(records[0].to_json());
    EXPECT_EQ(round.raw_text, "Yes");
    EXPECT_EQ(round.parsed, Answer::Yes);
}
