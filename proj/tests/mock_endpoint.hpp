#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace testing_support {

struct MockReply {
    int status = 200;
    std::string content; ///< assistant text, wrapped in a chat-completion body when status is 200
    std::optional<std::string> raw_body;
};

/// Local chat-completion server driven by a script of prompt -> reply.
class MockEndpoint {
  public:
    using Script = std::function<MockReply(const std::string& prompt, const httplib::Request&)>;

    explicit MockEndpoint(Script script) : script_(std::move(script)) {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            ++requests_;
            std::string prompt;
            try {
                prompt = nlohmann::json::parse(req.body).at("messages").at(0).at("content");
            } catch (const std::exception&) {
                res.status = 400;
                return;
            }
            {
                std::lock_guard lock(mutex_);
                last_headers_ = req.headers;
            }
            const auto reply = script_(prompt, req);
            res.status = reply.status;
            if (reply.raw_body) {
                res.set_content(*reply.raw_body, "application/json");
            } else if (reply.status == 200) {
                nlohmann::json body{
                    {"choices", {{{"message", {{"role", "assistant"}, {"content", reply.content}}}}}}};
                res.set_content(body.dump(), "application/json");
            } else {
                res.set_content(reply.content, "text/plain");
            }
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~MockEndpoint() {
        server_.stop();
        thread_.join();
    }

    MockEndpoint(const MockEndpoint&) = delete;
    MockEndpoint& operator=(const MockEndpoint&) = delete;

    [[nodiscard]] std::string url() const {
        return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    }

    [[nodiscard]] std::size_t requests() const { return requests_.load(); }

    [[nodiscard]] httplib::Headers last_headers() const {
        std::lock_guard lock(mutex_);
        return last_headers_;
    }

    /// Target number named in a default-template prompt.
    static int target_of(const std::string& prompt) {
        static const std::regex re("Does the number ([0-9]+)");
        std::smatch m;
        return std::regex_search(prompt, m, re) ? std::stoi(m[1]) : -1;
    }

  private:
    Script script_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    std::atomic<std::size_t> requests_{0};
    mutable std::mutex mutex_;
    httplib::Headers last_headers_;
};

} // namespace testing_support
