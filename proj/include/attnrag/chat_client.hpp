#pragma once

#include <functional>
#include <memory>
#include <string>

namespace attnrag {

/// Minimal chat-completion endpoint: one user prompt in, one reply out.
/// Implementations must tolerate concurrent calls.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const std::string& prompt) const = 0;
    virtual std::string name() const = 0;
};

/// Canned client for tests and offline runs.
class FnChatClient final : public ChatClient {
public:
    using Fn = std::function<std::string(const std::string&)>;

    explicit FnChatClient(Fn fn, std::string name = "fn")
        : fn_(std::move(fn)), name_(std::move(name)) {}

    std::string complete(const std::string& prompt) const override { return fn_(prompt); }
    std::string name() const override { return name_; }

private:
    Fn fn_;
    std::string name_;
};

/// OpenAI-style chat completions over HTTP. Credentials come from the named
/// environment variable only; they are never read from config files.
class HttpChatClient final : public ChatClient {
public:
    struct Options {
        std::string base_url;                         // e.g. "http://127.0.0.1:8080"
        std::string model;
        std::string api_key_env = "ATTNRAG_API_KEY";  // env var holding the key
        std::string path = "/v1/chat/completions";
        int timeout_seconds = 60;
        double temperature = 0.0;
    };

    explicit HttpChatClient(Options options);

    std::string complete(const std::string& prompt) const override;
    std::string name() const override { return "http:" + options_.model; }

private:
    Options options_;
};

}  // namespace attnrag
