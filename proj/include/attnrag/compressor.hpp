#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "attnrag/attention.hpp"
#include "attnrag/chunking.hpp"

namespace attnrag {

struct CompressorConfig {
    std::size_t top_k = 8;
    std::string none_literal = "none";
    std::optional<LayerRange> layer_range;  // null = all layers
    HeadMode head_mode = HeadMode::Mean;
};

/// Outcome of compressing one chunk. A skipped chunk contributes nothing:
/// empty text, empty selections.
struct ChunkDecision {
    std::size_t chunk_index = 0;
    bool skipped = false;
    FocalToken focal_token;
    std::vector<std::size_t> selected_token_positions;
    std::vector<Sentence> selected_sentences;
    std::string compressed_text;
};

/// True when the focal token, lowercased and stripped of punctuation and
/// whitespace, equals the configured irrelevance literal.
bool is_irrelevant(const FocalToken& focal, const CompressorConfig& cfg);

/// Positions of the min(k, n) largest scores, ties broken toward the smaller
/// position, returned in ascending position order. Throws ConfigError when
/// k is zero.
std::vector<std::size_t> select_top_k(const AttentionFeatureVector& features,
                                      std::size_t k);

/// The unique sentences containing at least one selected position, in
/// document order. A position outside every span raises InternalError
/// (sentence spans must partition the chunk).
std::vector<Sentence> select_sentences(const std::vector<std::size_t>& positions,
                                       const std::vector<Sentence>& sentences);

/// Full per-chunk procedure: irrelevance check, top-k token selection,
/// sentence mapping, concatenation with single spaces.
ChunkDecision compress_chunk(const ContextChunk& chunk,
                             const AttentionFeatureVector& features,
                             const FocalToken& focal,
                             const CompressorConfig& cfg);

/// Join the non-empty compressed chunk texts with single newlines, ordered by
/// chunk index. Empty when every chunk was skipped.
std::string concat_compressed(const std::vector<ChunkDecision>& decisions);

}  // namespace attnrag
