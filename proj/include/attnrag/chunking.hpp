#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "attnrag/tokenizer.hpp"

namespace attnrag {

/// Retrieved documents and their concatenation. The context text is always
/// derived from the documents, never stored separately.
struct RetrievedContext {
    std::vector<std::string> documents;
    std::string separator = "\n\n";

    std::string text() const;

    static RetrievedContext from_text(std::string text);
};

/// One sentence within a chunk. `begin`/`end` are a half-open token interval
/// relative to the chunk; the spans of a chunk's sentences partition
/// [0, chunk token count).
struct Sentence {
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// A uniform token window over the retrieved context. Indices are 1-based so
/// diagnostics read as "chunk j of n". All chunks except possibly the last
/// hold exactly the configured number of tokens.
struct ContextChunk {
    std::size_t index = 0;
    TokenSequence tokens;
    std::string text;
    std::vector<Sentence> sentences;
};

/// Partition `tokens` into ceil(|tokens| / chunk_size) disjoint windows, in
/// order, with no overlap. Empty input gives an empty list.
/// Throws ConfigError when chunk_size is zero.
std::vector<ContextChunk> chunk_uniform(const TokenSequence& tokens,
                                        std::size_t chunk_size,
                                        const Tokenizer& tokenizer);

/// Split a chunk into sentences on '.', '!', '?' and newline runs, with
/// guards for common abbreviations, single-letter initials, and decimal
/// points. Every token lands in exactly one sentence; a chunk without any
/// terminator is a single sentence. Fragments created by chunk boundaries
/// become sentences of their own.
std::vector<Sentence> segment_sentences(const ContextChunk& chunk);

/// chunk_uniform followed by sentence segmentation for each chunk.
std::vector<ContextChunk> chunk_context(const TokenSequence& tokens,
                                        std::size_t chunk_size,
                                        const Tokenizer& tokenizer);

}  // namespace attnrag
