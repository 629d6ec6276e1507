#include "attnrag/chat_client.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "attnrag/errors.hpp"

namespace attnrag {

namespace {
using json = nlohmann::json;
}

HttpChatClient::HttpChatClient(Options options) : options_(std::move(options)) {
    if (options_.base_url.empty()) {
        throw ConfigError("chat client needs a base_url");
    }
}

std::string HttpChatClient::complete(const std::string& prompt) const {
    httplib::Client client(options_.base_url);
    client.set_connection_timeout(options_.timeout_seconds);
    client.set_read_timeout(options_.timeout_seconds);
    if (const char* key = std::getenv(options_.api_key_env.c_str());
        key != nullptr && *key != '\0') {
        client.set_bearer_token_auth(key);
    }

    json request;
    request["model"] = options_.model;
    request["temperature"] = options_.temperature;
    request["messages"] = json::array(
        {json{{"role", "user"}, {"content", prompt}}});

    auto response =
        client.Post(options_.path, request.dump(), "application/json");
    if (!response) {
        throw ProviderError("chat endpoint unreachable: " +
                            httplib::to_string(response.error()));
    }
    if (response->status < 200 || response->status >= 300) {
        throw ProviderError("chat endpoint returned status " +
                            std::to_string(response->status));
    }
    json body = json::parse(response->body, nullptr, false);
    if (body.is_discarded()) {
        throw ProviderError("chat endpoint returned malformed JSON");
    }
    // OpenAI layout first, plain {"content": ...} as a fallback.
    if (body.contains("choices") && body["choices"].is_array() &&
        !body["choices"].empty()) {
        const auto& choice = body["choices"][0];
        if (choice.contains("message") && choice["message"].contains("content") &&
            choice["message"]["content"].is_string()) {
            return choice["message"]["content"].get<std::string>();
        }
        if (choice.contains("text") && choice["text"].is_string()) {
            return choice["text"].get<std::string>();
        }
    }
    if (body.contains("content") && body["content"].is_string()) {
        return body["content"].get<std::string>();
    }
    throw ProviderError("chat response carries no completion text");
}

}  // namespace attnrag
