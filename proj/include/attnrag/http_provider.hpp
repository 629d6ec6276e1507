#pragma once

#include <string>

#include "attnrag/attention.hpp"

namespace attnrag {

/// Remote attention provider over HTTP, for plugging in a real model served
/// by an inference sidecar (see scripts/attention_server.py).
///
/// Request (POST, JSON): {"prompt": str, "chunk_text": str, "model": str?}
/// Response: {"focal_token": str, "prompt_token_count": int,
///            "context_range": [begin, end]?,   // provider-tokenizer span
///            "attentions": [layers][heads][positions]}
/// A 413 status (or an "oversize" error payload) maps to OversizeChunkError;
/// anything else non-2xx, unreachable, or malformed maps to ProviderError.
struct HttpProviderOptions {
    std::string base_url;  // e.g. "http://127.0.0.1:8700"
    std::string path = "/v1/attention";
    std::string model;
    std::string api_key_env = "ATTNRAG_API_KEY";  // bearer token, env only
    int timeout_seconds = 120;
};

class HttpAttentionProvider final : public AttentionProvider {
public:
    explicit HttpAttentionProvider(HttpProviderOptions options);

    ProviderResult decode_focal(const AnchorPrompt& prompt) const override;
    std::string name() const override { return "http"; }

    const HttpProviderOptions& options() const { return options_; }

private:
    HttpProviderOptions options_;
};

}  // namespace attnrag
