#include "attnrag/attention.hpp"

#include <string>

#include "attnrag/errors.hpp"
#include "attnrag/prompts.hpp"

namespace attnrag {

namespace {

void replace_all(std::string& text, std::string_view slot, std::string_view value) {
    std::size_t pos = 0;
    while ((pos = text.find(slot, pos)) != std::string::npos) {
        text.replace(pos, slot.size(), value);
        pos += value.size();
    }
}

void replace_once(std::string& text, std::string_view slot, std::string_view value) {
    const std::size_t pos = text.find(slot);
    if (pos != std::string::npos) {
        text.replace(pos, slot.size(), value);
    }
}

// Locate `needle` as a contiguous token subsequence of `haystack`. The first
// token may differ in leading whitespace only: the template seam in front of
// the chunk merges the chunk's leading whitespace into one prompt token.
std::optional<std::size_t> find_token_span(const TokenSequence& haystack,
                                           const TokenSequence& needle) {
    if (needle.empty() || haystack.size() < needle.size()) {
        return std::nullopt;
    }
    const std::string_view first = token_content(needle.front());
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        if (token_content(haystack[i]) != first) continue;
        bool match = true;
        for (std::size_t j = 1; j < needle.size(); ++j) {
            if (haystack[i + j] != needle[j]) {
                match = false;
                break;
            }
        }
        if (match) return i;
    }
    return std::nullopt;
}

}  // namespace

AnchorPrompt build_anchor_prompt(const ContextChunk& chunk, const Query& query,
                                 const AnswerHintPrefix& prefix,
                                 const Tokenizer& tokenizer) {
    std::string text(kAnchorPromptTemplate);
    replace_once(text, "{chunk}", chunk.text);
    replace_once(text, "{question}", query.text);
    replace_all(text, "{prefix_hint}", prefix.text);

    AnchorPrompt prompt;
    prompt.text = std::move(text);
    prompt.chunk_index = chunk.index;
    prompt.chunk_text = chunk.text;
    prompt.query_text = query.text;
    prompt.prefix_text = prefix.text;

    const TokenSequence prompt_tokens = tokenizer.encode(prompt.text);
    const auto start = find_token_span(prompt_tokens, chunk.tokens);
    if (!start) {
        throw SpanAlignmentError(
            "chunk " + std::to_string(chunk.index) +
            " re-tokenized to a different span inside the anchor prompt");
    }
    prompt.context_begin = *start;
    prompt.context_end = *start + chunk.tokens.size();
    return prompt;
}

AttentionFeatureVector aggregate_attention(const AttentionTrace& trace,
                                           std::size_t context_begin,
                                           std::size_t context_end,
                                           std::optional<LayerRange> layer_range,
                                           HeadMode mode) {
    if (trace.num_layers() == 0 || trace.num_heads() == 0) {
        throw IndexError("attention trace is empty");
    }
    const LayerRange range =
        layer_range.value_or(LayerRange{0, trace.num_layers() - 1});
    if (range.lo > range.hi || range.hi >= trace.num_layers()) {
        throw IndexError("layer range [" + std::to_string(range.lo) + ", " +
                         std::to_string(range.hi) + "] invalid for trace with " +
                         std::to_string(trace.num_layers()) + " layers");
    }
    if (context_begin > context_end || context_end > trace.width()) {
        throw IndexError("context range [" + std::to_string(context_begin) + ", " +
                         std::to_string(context_end) + ") outside trace width " +
                         std::to_string(trace.width()));
    }

    AttentionFeatureVector features;
    features.layer_range = range;
    features.scores.assign(context_end - context_begin, 0.0);
    for (std::size_t l = range.lo; l <= range.hi; ++l) {
        const auto& heads = trace.layers[l];
        const double head_norm =
            (mode == HeadMode::Mean) ? 1.0 / static_cast<double>(heads.size()) : 1.0;
        for (const auto& row : heads) {
            for (std::size_t p = context_begin; p < context_end; ++p) {
                features.scores[p - context_begin] += row[p] * head_norm;
            }
        }
    }
    return features;
}

std::vector<ProviderResult> AttentionProvider::decode_focal_batch(
    std::span<const AnchorPrompt> prompts) const {
    std::vector<ProviderResult> results;
    results.reserve(prompts.size());
    for (const auto& prompt : prompts) {
        results.push_back(decode_focal(prompt));
    }
    return results;
}

ProviderResult decode_focal(const AttentionProvider& provider,
                            const AnchorPrompt& prompt) {
    return provider.decode_focal(prompt);
}

}  // namespace attnrag
