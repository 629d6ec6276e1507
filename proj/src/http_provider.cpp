#include "attnrag/http_provider.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "attnrag/errors.hpp"

namespace attnrag {

namespace {

using json = nlohmann::json;

bool mentions_oversize(const std::string& body) {
    return body.find("oversize") != std::string::npos ||
           body.find("context length") != std::string::npos ||
           body.find("too long") != std::string::npos;
}

}  // namespace

HttpAttentionProvider::HttpAttentionProvider(HttpProviderOptions options)
    : options_(std::move(options)) {
    if (options_.base_url.empty()) {
        throw ConfigError("http provider needs a base_url");
    }
}

ProviderResult HttpAttentionProvider::decode_focal(
    const AnchorPrompt& prompt) const {
    httplib::Client client(options_.base_url);
    client.set_connection_timeout(options_.timeout_seconds);
    client.set_read_timeout(options_.timeout_seconds);
    if (const char* key = std::getenv(options_.api_key_env.c_str());
        key != nullptr && *key != '\0') {
        client.set_bearer_token_auth(key);
    }

    json request;
    request["prompt"] = prompt.text;
    request["chunk_text"] = prompt.chunk_text;
    if (!options_.model.empty()) request["model"] = options_.model;

    auto response =
        client.Post(options_.path, request.dump(), "application/json");
    if (!response) {
        throw ProviderError("attention endpoint unreachable: " +
                                httplib::to_string(response.error()),
                            prompt.chunk_index);
    }
    if (response->status == 413 ||
        (response->status >= 400 && mentions_oversize(response->body))) {
        throw OversizeChunkError("prompt exceeds the provider context window");
    }
    if (response->status < 200 || response->status >= 300) {
        throw ProviderError("attention endpoint returned status " +
                                std::to_string(response->status),
                            prompt.chunk_index);
    }

    json body = json::parse(response->body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        throw ProviderError("attention endpoint returned malformed JSON",
                            prompt.chunk_index);
    }
    if (!body.contains("focal_token") || !body["focal_token"].is_string() ||
        !body.contains("attentions") || !body["attentions"].is_array() ||
        !body.contains("prompt_token_count") ||
        !body["prompt_token_count"].is_number_unsigned()) {
        throw ProviderError("attention response missing required fields",
                            prompt.chunk_index);
    }

    ProviderResult result;
    result.focal.text = body["focal_token"].get<std::string>();
    result.prompt_token_count = body["prompt_token_count"].get<std::size_t>();
    result.focal.position = result.prompt_token_count;

    const auto& layers = body["attentions"];
    if (layers.empty()) {
        throw ProviderError("attention response carries no layers",
                            prompt.chunk_index);
    }
    result.trace.layers.reserve(layers.size());
    std::size_t heads = 0, width = 0;
    for (const auto& layer : layers) {
        if (!layer.is_array() || layer.empty()) {
            throw ProviderError("attention layer is not a non-empty array",
                                prompt.chunk_index);
        }
        std::vector<std::vector<double>> rows;
        rows.reserve(layer.size());
        for (const auto& head : layer) {
            if (!head.is_array() || head.empty()) {
                throw ProviderError("attention head row is not a non-empty array",
                                    prompt.chunk_index);
            }
            std::vector<double> row;
            row.reserve(head.size());
            for (const auto& w : head) {
                if (!w.is_number()) {
                    throw ProviderError("attention weight is not a number",
                                        prompt.chunk_index);
                }
                row.push_back(w.get<double>());
            }
            if (width == 0) width = row.size();
            if (row.size() != width) {
                throw ProviderError("ragged attention rows", prompt.chunk_index);
            }
            rows.push_back(std::move(row));
        }
        if (heads == 0) heads = rows.size();
        if (rows.size() != heads) {
            throw ProviderError("layers disagree on head count",
                                prompt.chunk_index);
        }
        result.trace.layers.push_back(std::move(rows));
    }

    if (body.contains("context_range")) {
        const auto& range = body["context_range"];
        if (!range.is_array() || range.size() != 2 ||
            !range[0].is_number_unsigned() || !range[1].is_number_unsigned()) {
            throw ProviderError("context_range must be [begin, end]",
                                prompt.chunk_index);
        }
        const auto begin = range[0].get<std::size_t>();
        const auto end = range[1].get<std::size_t>();
        if (begin >= end || end > width) {
            throw ProviderError("context_range outside the attention width",
                                prompt.chunk_index);
        }
        result.context_range = {begin, end};
    }
    return result;
}

}  // namespace attnrag
