#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "attnrag/chunking.hpp"
#include "attnrag/prefix.hpp"
#include "attnrag/tokenizer.hpp"

namespace attnrag {

/// Inclusive range of decoder layers to aggregate over.
struct LayerRange {
    std::size_t lo = 0;
    std::size_t hi = 0;
};

/// The single token greedily decoded after the answer hint prefix. `position`
/// is its index in the full token sequence, i.e. the prompt token count.
struct FocalToken {
    std::string text;
    std::size_t position = 0;
};

/// Per-layer, per-head attention rows from the focal position onto every
/// prompt position. Each row is a softmax distribution: non-negative, summing
/// to 1 over the attended positions.
struct AttentionTrace {
    // layers[l][h][p]: weight from the focal token to prompt position p.
    std::vector<std::vector<std::vector<double>>> layers;

    std::size_t num_layers() const { return layers.size(); }
    std::size_t num_heads() const { return layers.empty() ? 0 : layers[0].size(); }
    std::size_t width() const {
        return (layers.empty() || layers[0].empty()) ? 0 : layers[0][0].size();
    }
};

/// One aggregated relevance score per context token of a chunk.
struct AttentionFeatureVector {
    std::vector<double> scores;
    LayerRange layer_range;
};

/// The assembled provider prompt for one chunk, plus the half-open token
/// interval where the chunk's tokens sit inside the prompt. The structured
/// parts are kept alongside the text for providers that want them.
struct AnchorPrompt {
    std::string text;
    std::size_t context_begin = 0;
    std::size_t context_end = 0;
    std::size_t chunk_index = 0;
    std::string chunk_text;
    std::string query_text;
    std::string prefix_text;
};

enum class HeadMode { Mean, Sum };

/// Render the anchor prompt for a chunk and locate the chunk's token span by
/// re-tokenizing the assembled prompt and searching for the chunk's tokens as
/// a contiguous subsequence. The first prompt token of the span may differ
/// from the chunk's first token only in leading whitespace (the template seam
/// merges whitespace); any other mismatch raises SpanAlignmentError.
AnchorPrompt build_anchor_prompt(const ContextChunk& chunk, const Query& query,
                                 const AnswerHintPrefix& prefix,
                                 const Tokenizer& tokenizer);

/// Sum attention onto each context token over the chosen layers, heads
/// combined per `mode` (mean keeps each layer's contribution on a [0, 1]
/// scale). Positions outside [context_begin, context_end) are excluded:
/// instruction, query, hint, and prefix tokens never receive scores.
/// A null layer range means all layers in the trace.
AttentionFeatureVector aggregate_attention(const AttentionTrace& trace,
                                           std::size_t context_begin,
                                           std::size_t context_end,
                                           std::optional<LayerRange> layer_range,
                                           HeadMode mode = HeadMode::Mean);

struct ProviderResult {
    FocalToken focal;
    AttentionTrace trace;
    std::size_t prompt_token_count = 0;
    /// Set when the provider located the chunk span under its own tokenizer;
    /// overrides the span computed by build_anchor_prompt.
    std::optional<std::pair<std::size_t, std::size_t>> context_range;
};

/// Decodes one focal token per prompt and exposes per-layer attention for it.
/// Implementations must be safe to call from concurrent batches and must be
/// deterministic for identical prompts (greedy decoding).
class AttentionProvider {
public:
    virtual ~AttentionProvider() = default;

    virtual ProviderResult decode_focal(const AnchorPrompt& prompt) const = 0;

    /// Batched variant; the default processes prompts in order. Overrides
    /// must return results in prompt order with content identical to the
    /// sequential path.
    virtual std::vector<ProviderResult> decode_focal_batch(
        std::span<const AnchorPrompt> prompts) const;

    virtual std::string name() const = 0;
};

/// Free-function form used by callers that hold a provider reference.
ProviderResult decode_focal(const AttentionProvider& provider,
                            const AnchorPrompt& prompt);

}  // namespace attnrag
