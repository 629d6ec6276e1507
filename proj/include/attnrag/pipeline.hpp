#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "attnrag/attention.hpp"
#include "attnrag/chunking.hpp"
#include "attnrag/compressor.hpp"
#include "attnrag/prefix.hpp"
#include "attnrag/tokenizer.hpp"

namespace attnrag {

/// What to do when the provider fails on one chunk.
enum class ChunkFailurePolicy { FailFast, SkipChunkWithWarning };

struct PipelineConfig {
    std::size_t chunk_size = 50;
    CompressorConfig compressor;
    std::size_t batch_size = 8;
    ChunkFailurePolicy failure_policy = ChunkFailurePolicy::FailFast;
};

/// original tokens / compressed tokens; null when nothing survived.
std::optional<double> compression_ratio(std::size_t original_tokens,
                                        std::size_t compressed_tokens);

struct CompressionResult {
    std::string compressed_text;
    std::size_t original_token_count = 0;
    std::size_t compressed_token_count = 0;
    std::optional<double> ratio;
    std::vector<ChunkDecision> per_chunk;
    AnswerHintPrefix prefix_used;
    std::vector<std::string> warnings;
    std::map<std::string, double> timings_ms;  // diagnostics only, never serialized
};

/// End-to-end compression: hint prefix, uniform chunking, batched focal
/// decoding, per-token attention aggregation, sentence selection, and
/// concatenation. Immutable after construction and shareable across threads.
class Pipeline {
public:
    Pipeline(std::shared_ptr<const Tokenizer> tokenizer,
             std::shared_ptr<const AttentionProvider> provider,
             std::shared_ptr<const PrefixGenerator> prefix_generator,
             PipelineConfig config);

    /// Deterministic given a fixed provider, seed, and config. Batched and
    /// sequential execution produce identical content.
    CompressionResult run(const Query& query, const RetrievedContext& context) const;

    const PipelineConfig& config() const { return config_; }
    const Tokenizer& tokenizer() const { return *tokenizer_; }
    const AttentionProvider& provider() const { return *provider_; }

    /// Copy of this pipeline with different settings; shares the tokenizer,
    /// provider, and prefix generator. Used by ablation sweeps.
    Pipeline with_config(PipelineConfig config) const;

private:
    std::shared_ptr<const Tokenizer> tokenizer_;
    std::shared_ptr<const AttentionProvider> provider_;
    std::shared_ptr<const PrefixGenerator> prefix_generator_;
    PipelineConfig config_;
};

}  // namespace attnrag
