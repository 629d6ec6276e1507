#include "attnrag/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>

#include "attnrag/errors.hpp"

namespace attnrag {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string rstrip(std::string text) {
    while (!text.empty() &&
           std::isspace(static_cast<unsigned char>(text.back()))) {
        text.pop_back();
    }
    return text;
}

// A selected sentence that touches a chunk edge without a terminator is a
// fragment of a sentence split by the uniform chunk boundary.
bool is_boundary_fragment(const Sentence& sentence, const ContextChunk& chunk) {
    if (sentence.end != chunk.tokens.size()) return false;
    const std::string_view tail = token_content(chunk.tokens[sentence.end - 1]);
    return tail != "." && tail != "!" && tail != "?";
}

}  // namespace

std::optional<double> compression_ratio(std::size_t original_tokens,
                                        std::size_t compressed_tokens) {
    if (compressed_tokens == 0) {
        return std::nullopt;
    }
    return static_cast<double>(original_tokens) /
           static_cast<double>(compressed_tokens);
}

Pipeline::Pipeline(std::shared_ptr<const Tokenizer> tokenizer,
                   std::shared_ptr<const AttentionProvider> provider,
                   std::shared_ptr<const PrefixGenerator> prefix_generator,
                   PipelineConfig config)
    : tokenizer_(std::move(tokenizer)),
      provider_(std::move(provider)),
      prefix_generator_(std::move(prefix_generator)),
      config_(std::move(config)) {
    if (config_.chunk_size == 0) throw ConfigError("chunk_size must be >= 1");
    if (config_.batch_size == 0) throw ConfigError("batch_size must be >= 1");
    if (config_.compressor.top_k == 0) throw ConfigError("top_k must be >= 1");
}

Pipeline Pipeline::with_config(PipelineConfig config) const {
    return Pipeline(tokenizer_, provider_, prefix_generator_, std::move(config));
}

CompressionResult Pipeline::run(const Query& query,
                                const RetrievedContext& context) const {
    const auto total_start = Clock::now();
    CompressionResult result;

    auto stage_start = Clock::now();
    try {
        result.prefix_used = prefix_generator_->prefix_for(query);
    } catch (const Error& e) {
        result.prefix_used = rule_based_prefix(query);
        result.warnings.push_back(std::string("prefix generation failed (") +
                                  e.what() + "); fell back to rule-based prefix");
    }
    if (result.prefix_used.looks_complete) {
        result.warnings.push_back(
            "hint prefix looks like a complete answer; passed through untruncated");
    }
    result.timings_ms["prefix"] = ms_since(stage_start);

    // Trailing whitespace carries nothing and would tokenize into a
    // whitespace-only token that cannot be located inside the prompt.
    stage_start = Clock::now();
    const std::string context_text = rstrip(context.text());
    const TokenSequence tokens = tokenizer_->encode(context_text);
    result.original_token_count = tokens.size();
    result.timings_ms["tokenize"] = ms_since(stage_start);

    if (tokens.empty()) {
        result.timings_ms["total"] = ms_since(total_start);
        return result;
    }

    stage_start = Clock::now();
    const std::vector<ContextChunk> chunks =
        chunk_context(tokens, config_.chunk_size, *tokenizer_);
    result.timings_ms["chunk"] = ms_since(stage_start);

    stage_start = Clock::now();
    std::vector<AnchorPrompt> prompts;
    prompts.reserve(chunks.size());
    for (const auto& chunk : chunks) {
        prompts.push_back(
            build_anchor_prompt(chunk, query, result.prefix_used, *tokenizer_));
    }

    std::vector<std::optional<ProviderResult>> provider_results(chunks.size());
    for (std::size_t begin = 0; begin < prompts.size();
         begin += config_.batch_size) {
        const std::size_t count =
            std::min(config_.batch_size, prompts.size() - begin);
        const std::span<const AnchorPrompt> batch(prompts.data() + begin, count);
        try {
            auto batch_results = provider_->decode_focal_batch(batch);
            if (batch_results.size() != count) {
                throw ProviderError("provider returned " +
                                    std::to_string(batch_results.size()) +
                                    " results for a batch of " +
                                    std::to_string(count));
            }
            for (std::size_t i = 0; i < count; ++i) {
                provider_results[begin + i] = std::move(batch_results[i]);
            }
        } catch (const Error& e) {
            if (config_.failure_policy == ChunkFailurePolicy::FailFast) {
                throw ProviderError(e.what(), chunks[begin].index);
            }
            for (std::size_t i = 0; i < count; ++i) {
                result.warnings.push_back(
                    "chunk " + std::to_string(chunks[begin + i].index) +
                    " skipped after provider failure: " + e.what());
            }
        }
    }
    result.timings_ms["decode"] = ms_since(stage_start);

    stage_start = Clock::now();
    result.per_chunk.reserve(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        const ContextChunk& chunk = chunks[i];
        if (!provider_results[i]) {
            ChunkDecision failed;
            failed.chunk_index = chunk.index;
            failed.skipped = true;
            result.per_chunk.push_back(std::move(failed));
            continue;
        }
        const ProviderResult& pr = *provider_results[i];
        std::size_t ctx_begin = prompts[i].context_begin;
        std::size_t ctx_end = prompts[i].context_end;
        if (pr.context_range) {
            ctx_begin = pr.context_range->first;
            ctx_end = pr.context_range->second;
        }
        if (ctx_end - ctx_begin != chunk.tokens.size()) {
            throw SpanAlignmentError("context span width " +
                                     std::to_string(ctx_end - ctx_begin) +
                                     " does not match chunk " +
                                     std::to_string(chunk.index) + " token count " +
                                     std::to_string(chunk.tokens.size()));
        }
        const AttentionFeatureVector features =
            aggregate_attention(pr.trace, ctx_begin, ctx_end,
                                config_.compressor.layer_range,
                                config_.compressor.head_mode);
        ChunkDecision decision =
            compress_chunk(chunk, features, pr.focal, config_.compressor);
        for (const auto& sentence : decision.selected_sentences) {
            if (is_boundary_fragment(sentence, chunk)) {
                result.warnings.push_back(
                    "chunk " + std::to_string(chunk.index) +
                    ": selected sentence is a boundary fragment");
            }
        }
        result.per_chunk.push_back(std::move(decision));
    }

    result.compressed_text = concat_compressed(result.per_chunk);
    result.compressed_token_count = tokenizer_->count(result.compressed_text);
    result.ratio = compression_ratio(result.original_token_count,
                                     result.compressed_token_count);
    result.timings_ms["compress"] = ms_since(stage_start);
    result.timings_ms["total"] = ms_since(total_start);
    return result;
}

}  // namespace attnrag
