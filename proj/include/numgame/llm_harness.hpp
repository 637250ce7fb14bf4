#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "numgame/evaluation.hpp"
#include "numgame/example_set.hpp"

namespace numgame::llm {

inline constexpr const char* kDefaultPromptTemplate =
    "Here is a set of numbers that share a common mathematical concept: {examples}. "
    "Does the number {target} belong to the same concept? Answer only yes or no.";

inline constexpr const char* kDefaultApiKeyEnv = "NUMGAME_API_KEY";

enum class Answer { Yes, No, Invalid };

std::string_view to_string(Answer answer) noexcept;
Answer parse_answer_name(std::string_view text);

/// Substitutes {examples} (comma separated, given order) and {target}.
/// Throws Template when either slot is missing.
std::string build_prompt(std::string_view prompt_template, const ExampleSet& x, int target);

/// Case-insensitive leading yes/no token; anything else is Invalid.
Answer parse_response(std::string_view raw_text);

struct RetryPolicy {
    int max_attempts = 4;
    std::chrono::milliseconds base_backoff{500};
    std::chrono::milliseconds max_backoff{30000};

    /// Delay before attempt `attempt + 1`, doubling from base_backoff.
    [[nodiscard]] std::chrono::milliseconds delay_after(int attempt) const;
};

struct QueryJob {
    std::vector<ExampleSet> sets;
    std::vector<int> targets; ///< empty means 1..domain_max
    int trials = 10;
    std::string prompt_template = kDefaultPromptTemplate;
    std::string agent = "llm";
    int max_parallel = 4;
    RetryPolicy retry;
    std::optional<std::size_t> max_requests; ///< budget on HTTP requests, retries included
    std::optional<double> requests_per_second;
    int domain_max = 100;

    void validate() const;
    [[nodiscard]] std::vector<int> resolved_targets() const;
    [[nodiscard]] std::size_t planned_queries() const;
};

struct TrialRecord {
    std::string set_id;
    int target = 0;
    int trial_index = 0;
    std::string raw_text;
    Answer parsed = Answer::Invalid;
    double latency_ms = 0.0;
    int attempt_count = 0;

    [[nodiscard]] nlohmann::json to_json() const;
    static TrialRecord from_json(const nlohmann::json& doc);
};

struct ChatReply {
    enum class Status { Ok, Transient, Auth, Fatal };
    Status status = Status::Ok;
    std::string text;
    int http_status = 0;
};

/// One chat-completion round trip. Implementations must be callable from
/// several threads at once.
class ChatClient {
  public:
    virtual ~ChatClient() = default;
    virtual ChatReply complete(const std::string& prompt) = 0;
};

enum class AuthScheme { None, Bearer, Header };

struct HttpClientOptions {
    std::string endpoint; ///< e.g. https://api.openai.com/v1/chat/completions
    std::string model;
    std::optional<double> temperature;
    AuthScheme auth = AuthScheme::Bearer;
    std::string auth_header = "api-key"; ///< header name for AuthScheme::Header
    std::string api_key;
    std::chrono::seconds timeout{60};
};

/// POSTs {"model", "messages":[{"role":"user","content":prompt}], "temperature"?}
/// and reads choices[0].message.content (also message.content or response).
class HttpChatClient : public ChatClient {
  public:
    explicit HttpChatClient(HttpClientOptions options);
    ChatReply complete(const std::string& prompt) override;

    /// Splits "scheme://host[:port]/path" into origin and path.
    static std::pair<std::string, std::string> split_endpoint(const std::string& url);

  private:
    HttpClientOptions options_;
    std::string origin_;
    std::string path_;
};

/// Reads the API key from the named environment variable; Auth error if unset.
std::string api_key_from_env(const std::string& variable);

/// Extracts the assistant text from a chat-completion style response body.
std::optional<std::string> extract_reply_text(const nlohmann::json& body);

struct JobResult {
    ResponseMatrix matrix;
    std::vector<TrialRecord> records; ///< plan order
    bool partial = false;             ///< request budget ran out
    std::size_t requests_sent = 0;
    std::size_t resumed_records = 0;
};

/// Runs every (set, target, trial) query not already present in the trial log,
/// appending finished records to the log in plan order. Throws Auth on
/// credential failures.
JobResult run_job(const QueryJob& job, ChatClient& client,
                  const std::optional<std::filesystem::path>& log_path = std::nullopt);

/// p_yes = #Yes / (#Yes + #No) per cell; cells without a valid trial are
/// filled with the set mean. trial_counts holds the valid trial counts.
ResponseMatrix aggregate_trials(std::span<const TrialRecord> records,
                                std::span<const ExampleSet> sets, int domain_max,
                                const std::string& agent);

std::vector<TrialRecord> load_trial_log(const std::filesystem::path& path);

} // namespace numgame::llm
