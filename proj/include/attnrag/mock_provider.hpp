#pragma once

#include <cstdint>
#include <string>

#include "attnrag/attention.hpp"

namespace attnrag {

/// Deterministic stand-in for a real attention-exposing model.
///
/// Focal token: the last word of the last chunk sentence containing the
/// query's subject (its first content word), "none" when the subject does not
/// occur. For "Where is Daniel?" against "Daniel went to the park." that is
/// "park".
///
/// Attention: per layer and head, a softmax row over prompt positions whose
/// logits are an overlap bonus for context tokens lexically matching the
/// query's content words, plus a small hash-derived jitter keyed on
/// (seed, layer, head, position, prompt). Identical inputs and seed give a
/// bit-identical trace; the jitter never outweighs the bonus, so the argmax
/// always lands on an overlapping token when one exists.
struct MockProviderConfig {
    std::size_t num_layers = 32;
    std::size_t num_heads = 4;
    std::uint64_t seed = 0;
    double overlap_bonus = 2.0;  // logit added to matching context tokens
    double jitter = 0.01;        // amplitude of the hash jitter
    std::size_t max_prompt_tokens = 0;  // 0 = unlimited; else oversize error
};

class MockAttentionProvider final : public AttentionProvider {
public:
    explicit MockAttentionProvider(MockProviderConfig config = {});

    ProviderResult decode_focal(const AnchorPrompt& prompt) const override;
    std::string name() const override { return "mock"; }

    const MockProviderConfig& config() const { return config_; }

private:
    MockProviderConfig config_;
    WordTokenizer tokenizer_;
};

}  // namespace attnrag
