#include "numgame/llm_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include <httplib.h>

#include "numgame/dataset.hpp"
#include "numgame/error.hpp"
#include "numgame/text.hpp"

namespace numgame::llm {

namespace {

using Clock = std::chrono::steady_clock;
using Key = std::tuple<std::string, int, int>;

Key key_of(const TrialRecord& r) {
    return {r.set_id, r.target, r.trial_index};
}

void replace_all(std::string& text, std::string_view from, const std::string& to) {
    for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
        text.replace(pos, from.size(), to);
    }
}

/// Spaces request starts at least 1/rate seconds apart.
class Pacer {
  public:
    explicit Pacer(std::optional<double> rate) {
        if (rate && *rate > 0.0) {
            interval_ = std::chrono::duration_cast<Clock::duration>(
                std::chrono::duration<double>(1.0 / *rate));
        }
    }

    void wait() {
        if (interval_ == Clock::duration::zero()) {
            return;
        }
        Clock::time_point slot;
        {
            std::lock_guard lock(mutex_);
            slot = std::max(next_, Clock::now());
            next_ = slot + interval_;
        }
        std::this_thread::sleep_until(slot);
    }

  private:
    std::mutex mutex_;
    Clock::duration interval_{Clock::duration::zero()};
    Clock::time_point next_{};
};

struct Task {
    const ExampleSet* set = nullptr;
    int target = 0;
    int trial = 0;
};

/// Holds finished records until every earlier task is done, then appends them
/// to the log, so the log is always a prefix-ordered plan.
class OrderedLog {
  public:
    OrderedLog(std::size_t tasks, const std::optional<std::filesystem::path>& path)
        : slots_(tasks) {
        if (path) {
            if (path->has_parent_path()) {
                std::error_code ec;
                std::filesystem::create_directories(path->parent_path(), ec);
            }
            out_.open(*path, std::ios::app);
            if (!out_) {
                throw Error(ErrorCode::Io, "cannot append to trial log " + path->string());
            }
        }
    }

    void complete(std::size_t index, std::optional<TrialRecord> record) {
        std::lock_guard lock(mutex_);
        slots_[index] = Slot{true, std::move(record)};
        while (next_ < slots_.size() && slots_[next_].done) {
            if (slots_[next_].record && out_.is_open()) {
                out_ << slots_[next_].record->to_json().dump() << '\n';
                out_.flush();
            }
            ++next_;
        }
    }

    std::vector<std::optional<TrialRecord>> take() {
        std::vector<std::optional<TrialRecord>> out;
        out.reserve(slots_.size());
        for (auto& s : slots_) {
            out.push_back(std::move(s.record));
        }
        return out;
    }

  private:
    struct Slot {
        bool done = false;
        std::optional<TrialRecord> record;
    };
    std::mutex mutex_;
    std::vector<Slot> slots_;
    std::size_t next_ = 0;
    std::ofstream out_;
};

} // namespace

std::string_view to_string(Answer answer) noexcept {
    switch (answer) {
    case Answer::Yes: return "yes";
    case Answer::No: return "no";
    case Answer::Invalid: return "invalid";
    }
    return "invalid";
}

Answer parse_answer_name(std::string_view text) {
    if (text == "yes") return Answer::Yes;
    if (text == "no") return Answer::No;
    if (text == "invalid") return Answer::Invalid;
    throw Error(ErrorCode::Parse, "unknown answer '" + std::string(text) + "'");
}

std::string build_prompt(std::string_view prompt_template, const ExampleSet& x, int target) {
    std::string out(prompt_template);
    if (out.find("{examples}") == std::string::npos || out.find("{target}") == std::string::npos) {
        throw Error(ErrorCode::Template, "prompt template must contain {examples} and {target}");
    }
    std::string examples;
    for (std::size_t i = 0; i < x.examples.size(); ++i) {
        if (i > 0) {
            examples += ", ";
        }
        examples += std::to_string(x.examples[i]);
    }
    replace_all(out, "{examples}", examples);
    replace_all(out, "{target}", std::to_string(target));
    return out;
}

Answer parse_response(std::string_view raw_text) {
    std::size_t i = 0;
    while (i < raw_text.size() && !std::isalnum(static_cast<unsigned char>(raw_text[i]))) {
        ++i;
    }
    std::string token;
    while (i < raw_text.size() && std::isalpha(static_cast<unsigned char>(raw_text[i]))) {
        token += static_cast<char>(std::tolower(static_cast<unsigned char>(raw_text[i])));
        ++i;
    }
    if (token == "yes") return Answer::Yes;
    if (token == "no") return Answer::No;
    return Answer::Invalid;
}

std::chrono::milliseconds RetryPolicy::delay_after(int attempt) const {
    const auto shift = std::clamp(attempt - 1, 0, 30);
    const auto delay = base_backoff.count() * (1LL << shift);
    return std::chrono::milliseconds(std::min<long long>(delay, max_backoff.count()));
}

void QueryJob::validate() const {
    if (trials < 1) {
        throw Error(ErrorCode::Usage, "trials must be >= 1");
    }
    if (max_parallel < 1) {
        throw Error(ErrorCode::Usage, "max_parallel must be >= 1");
    }
    if (retry.max_attempts < 1) {
        throw Error(ErrorCode::Usage, "retry max_attempts must be >= 1");
    }
    if (prompt_template.find("{examples}") == std::string::npos ||
        prompt_template.find("{target}") == std::string::npos) {
        throw Error(ErrorCode::Template, "prompt template must contain {examples} and {target}");
    }
    for (int t : targets) {
        if (t < 1 || t > domain_max) {
            throw Error(ErrorCode::InvalidTarget, "target " + std::to_string(t) + " outside 1.." +
                                                      std::to_string(domain_max));
        }
    }
    for (const auto& s : sets) {
        validate_example_set(s, domain_max);
    }
}

std::vector<int> QueryJob::resolved_targets() const {
    if (!targets.empty()) {
        return targets;
    }
    std::vector<int> out(static_cast<std::size_t>(domain_max));
    for (int y = 1; y <= domain_max; ++y) {
        out[static_cast<std::size_t>(y - 1)] = y;
    }
    return out;
}

std::size_t QueryJob::planned_queries() const {
    return sets.size() * resolved_targets().size() * static_cast<std::size_t>(trials);
}

nlohmann::json TrialRecord::to_json() const {
    return {{"set_id", set_id},   {"target", target},
            {"trial", trial_index}, {"raw_text", raw_text},
            {"parsed", to_string(parsed)}, {"latency_ms", latency_ms},
            {"attempts", attempt_count}};
}

TrialRecord TrialRecord::from_json(const nlohmann::json& doc) {
    try {
        TrialRecord r;
        r.set_id = doc.at("set_id").get<std::string>();
        r.target = doc.at("target").get<int>();
        r.trial_index = doc.at("trial").get<int>();
        r.raw_text = doc.value("raw_text", std::string{});
        r.parsed = parse_answer_name(doc.at("parsed").get<std::string>());
        r.latency_ms = doc.value("latency_ms", 0.0);
        r.attempt_count = doc.value("attempts", 0);
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("trial record: ") + e.what());
    }
}

std::vector<TrialRecord> load_trial_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open trial log " + path.string());
    }
    std::vector<TrialRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        try {
            out.push_back(TrialRecord::from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Parse,
                        path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::string api_key_from_env(const std::string& variable) {
    const char* value = std::getenv(variable.c_str());
    if (value == nullptr || *value == '\0') {
        throw Error(ErrorCode::Auth, "environment variable " + variable + " is not set");
    }
    return value;
}

std::optional<std::string> extract_reply_text(const nlohmann::json& body) {
    if (body.contains("choices") && body["choices"].is_array() && !body["choices"].empty()) {
        const auto& choice = body["choices"][0];
        if (choice.contains("message") && choice["message"].contains("content") &&
            choice["message"]["content"].is_string()) {
            return choice["message"]["content"].get<std::string>();
        }
        if (choice.contains("text") && choice["text"].is_string()) {
            return choice["text"].get<std::string>();
        }
    }
    if (body.contains("message") && body["message"].is_object() &&
        body["message"].contains("content") && body["message"]["content"].is_string()) {
        return body["message"]["content"].get<std::string>();
    }
    if (body.contains("response") && body["response"].is_string()) {
        return body["response"].get<std::string>();
    }
    return std::nullopt;
}

std::pair<std::string, std::string> HttpChatClient::split_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::Usage, "endpoint '" + url + "' must start with http:// or https://");
    }
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw Error(ErrorCode::Usage, "unsupported endpoint scheme '" + scheme + "'");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/v1/chat/completions"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

HttpChatClient::HttpChatClient(HttpClientOptions options) : options_(std::move(options)) {
    std::tie(origin_, path_) = split_endpoint(options_.endpoint);
    if (options_.auth != AuthScheme::None && options_.api_key.empty()) {
        throw Error(ErrorCode::Auth, "an API key is required for the selected auth scheme");
    }
}

ChatReply HttpChatClient::complete(const std::string& prompt) {
    // httplib::Client is not safe to share across threads; one per call.
    httplib::Client client(origin_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);

    httplib::Headers headers;
    if (options_.auth == AuthScheme::Bearer) {
        headers.emplace("Authorization", "Bearer " + options_.api_key);
    } else if (options_.auth == AuthScheme::Header) {
        headers.emplace(options_.auth_header, options_.api_key);
    }
    nlohmann::json body{{"model", options_.model},
                        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
    if (options_.temperature) {
        body["temperature"] = *options_.temperature;
    }

    const auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
        return {ChatReply::Status::Transient, httplib::to_string(res.error()), 0};
    }
    const int status = res->status;
    if (status == 401 || status == 403) {
        return {ChatReply::Status::Auth, res->body, status};
    }
    if (status == 408 || status == 429 || status >= 500) {
        return {ChatReply::Status::Transient, res->body, status};
    }
    if (status < 200 || status >= 300) {
        return {ChatReply::Status::Fatal, res->body, status};
    }
    const auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
        return {ChatReply::Status::Transient, "unparsable response body", status};
    }
    const auto text = extract_reply_text(parsed);
    if (!text) {
        return {ChatReply::Status::Transient, "response has no message content", status};
    }
    return {ChatReply::Status::Ok, *text, status};
}

ResponseMatrix aggregate_trials(std::span<const TrialRecord> records,
                                std::span<const ExampleSet> sets, int domain_max,
                                const std::string& agent) {
    struct Counts {
        int yes = 0;
        int no = 0;
    };
    std::map<std::string, std::vector<Counts>> cells;
    std::set<std::string> known;
    for (const auto& s : sets) {
        known.insert(s.id);
    }
    const auto n = static_cast<std::size_t>(domain_max);
    for (const auto& r : records) {
        if (!known.count(r.set_id) || r.target < 1 || r.target > domain_max) {
            continue;
        }
        auto& row = cells.try_emplace(r.set_id, n).first->second;
        auto& c = row[static_cast<std::size_t>(r.target - 1)];
        if (r.parsed == Answer::Yes) {
            ++c.yes;
        } else if (r.parsed == Answer::No) {
            ++c.no;
        }
    }

    ResponseMatrix m;
    m.agent = agent;
    m.domain_max = domain_max;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [set_id, row] : cells) {
        auto& values = m.rows.try_emplace(set_id, n, nan).first->second;
        auto& counts = m.trial_counts.try_emplace(set_id, n, 0).first->second;
        for (std::size_t i = 0; i < n; ++i) {
            const int valid = row[i].yes + row[i].no;
            counts[i] = valid;
            if (valid > 0) {
                values[i] = static_cast<double>(row[i].yes) / static_cast<double>(valid);
            }
        }
    }
    fill_missing_cells(m, MissingCellPolicy::SetMean);
    return m;
}

JobResult run_job(const QueryJob& job, ChatClient& client,
                  const std::optional<std::filesystem::path>& log_path) {
    job.validate();
    const auto targets = job.resolved_targets();

    std::vector<TrialRecord> existing;
    if (log_path && std::filesystem::exists(*log_path)) {
        existing = load_trial_log(*log_path);
    }
    std::map<Key, const TrialRecord*> done;
    for (const auto& r : existing) {
        done.emplace(key_of(r), &r);
    }

    std::vector<Task> plan;
    std::vector<const TrialRecord*> prior_record;
    for (const auto& s : job.sets) {
        for (int t : targets) {
            for (int k = 0; k < job.trials; ++k) {
                const auto it = done.find({s.id, t, k});
                plan.push_back({&s, t, k});
                prior_record.push_back(it == done.end() ? nullptr : it->second);
            }
        }
    }

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        if (prior_record[i] == nullptr) {
            pending.push_back(i);
        }
    }

    OrderedLog log(pending.size(), log_path);
    Pacer pacer(job.requests_per_second);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> requests{0};
    std::atomic<bool> stop{false};
    std::atomic<bool> budget_hit{false};
    std::mutex error_mutex;
    std::optional<Error> fatal;

    const auto take_request = [&]() {
        if (!job.max_requests) {
            ++requests;
            return true;
        }
        auto current = requests.load();
        while (current < *job.max_requests) {
            if (requests.compare_exchange_weak(current, current + 1)) {
                return true;
            }
        }
        budget_hit = true;
        return false;
    };

    const auto run_task = [&](const Task& task) -> std::optional<TrialRecord> {
        TrialRecord record{task.set->id, task.target, task.trial, {}, Answer::Invalid, 0.0, 0};
        const auto prompt = build_prompt(job.prompt_template, *task.set, task.target);
        for (int attempt = 1; attempt <= job.retry.max_attempts; ++attempt) {
            if (stop || !take_request()) {
                return std::nullopt;
            }
            pacer.wait();
            const auto start = Clock::now();
            const auto reply = client.complete(prompt);
            record.latency_ms =
                std::chrono::duration<double, std::milli>(Clock::now() - start).count();
            record.attempt_count = attempt;
            record.raw_text = reply.text;
            if (reply.status == ChatReply::Status::Auth) {
                std::lock_guard lock(error_mutex);
                if (!fatal) {
                    fatal.emplace(ErrorCode::Auth, "endpoint rejected credentials (HTTP " +
                                                       std::to_string(reply.http_status) + ")");
                }
                stop = true;
                return std::nullopt;
            }
            if (reply.status == ChatReply::Status::Fatal) {
                record.parsed = Answer::Invalid;
                return record;
            }
            if (reply.status == ChatReply::Status::Ok) {
                record.parsed = parse_response(reply.text);
                if (record.parsed != Answer::Invalid) {
                    return record;
                }
            }
            if (attempt < job.retry.max_attempts) {
                std::this_thread::sleep_for(job.retry.delay_after(attempt));
            }
        }
        record.parsed = Answer::Invalid;
        return record;
    };

    const auto worker = [&]() {
        while (true) {
            const auto i = next++;
            if (i >= pending.size()) {
                return;
            }
            std::optional<TrialRecord> record;
            if (!stop) {
                try {
                    record = run_task(plan[pending[i]]);
                } catch (const Error& e) {
                    std::lock_guard lock(error_mutex);
                    if (!fatal) {
                        fatal = e;
                    }
                    stop = true;
                }
            }
            log.complete(i, std::move(record));
        }
    };

    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(job.max_parallel),
                                               std::max<std::size_t>(pending.size(), 1));
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back(worker);
    }
    for (auto& t : threads) {
        t.join();
    }
    if (fatal) {
        throw *fatal;
    }

    auto fresh = log.take();
    JobResult result;
    result.requests_sent = requests.load();
    result.resumed_records = plan.size() - pending.size();
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        if (prior_record[i] != nullptr) {
            result.records.push_back(*prior_record[i]);
        } else {
            auto& r = fresh[cursor++];
            if (r) {
                result.records.push_back(std::move(*r));
            } else {
                result.partial = true;
            }
        }
    }
    result.partial = result.partial || budget_hit;
    result.matrix = aggregate_trials(result.records, job.sets, job.domain_max, job.agent);
    return result;
}

} // namespace numgame::llm
