#include "attnrag/chunking.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "attnrag/errors.hpp"

namespace attnrag {

std::string RetrievedContext::text() const {
    std::string out;
    for (std::size_t i = 0; i < documents.size(); ++i) {
        if (i > 0) out += separator;
        out += documents[i];
    }
    return out;
}

RetrievedContext RetrievedContext::from_text(std::string text) {
    RetrievedContext ctx;
    ctx.documents.push_back(std::move(text));
    return ctx;
}

std::vector<ContextChunk> chunk_uniform(const TokenSequence& tokens,
                                        std::size_t chunk_size,
                                        const Tokenizer& tokenizer) {
    if (chunk_size == 0) {
        throw ConfigError("chunk_size must be >= 1");
    }
    std::vector<ContextChunk> chunks;
    if (tokens.empty()) {
        return chunks;
    }
    const std::size_t n = (tokens.size() + chunk_size - 1) / chunk_size;
    chunks.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t begin = j * chunk_size;
        const std::size_t end = std::min(begin + chunk_size, tokens.size());
        ContextChunk chunk;
        chunk.index = j + 1;
        chunk.tokens.assign(tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                            tokens.begin() + static_cast<std::ptrdiff_t>(end));
        chunk.text = tokenizer.decode(chunk.tokens);
        chunks.push_back(std::move(chunk));
    }
    return chunks;
}

namespace {

const std::unordered_set<std::string>& abbreviations() {
    static const std::unordered_set<std::string> set = {
        "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs",
        "etc", "al", "inc", "ltd", "co", "fig", "eg", "ie", "approx",
    };
    return set;
}

bool is_terminator(std::string_view content) {
    return content == "." || content == "!" || content == "?";
}

bool is_trailing_quote(std::string_view content) {
    return content == "\"" || content == "'" || content == ")" || content == "]";
}

bool has_leading_whitespace(std::string_view token) {
    return !token.empty() && token_content(token).size() < token.size();
}

bool has_leading_newline(std::string_view token) {
    // Scan only the whitespace prefix.
    const std::size_t ws_len = token.size() - token_content(token).size();
    for (std::size_t i = 0; i < ws_len; ++i) {
        if (token[i] == '\n') return true;
    }
    return false;
}

// A '.' does not end a sentence after an abbreviation, a single-letter
// initial, or when glued to the next token (decimals, "e.g").
bool guarded_period(const TokenSequence& tokens, std::size_t i) {
    if (i == 0) return true;  // leading '.' never closes anything
    const std::string prev = token_word(tokens[i - 1]);
    if (prev.empty()) return false;
    if (prev.size() == 1 && std::isalpha(static_cast<unsigned char>(prev[0]))) {
        return true;
    }
    return abbreviations().count(prev) > 0;
}

}  // namespace

std::vector<Sentence> segment_sentences(const ContextChunk& chunk) {
    const TokenSequence& tokens = chunk.tokens;
    std::vector<Sentence> sentences;
    if (tokens.empty()) {
        return sentences;
    }

    // boundary_after[i] == true: a sentence ends at token i (inclusive).
    std::vector<bool> boundary_after(tokens.size(), false);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string_view content = token_content(tokens[i]);
        bool boundary = false;
        if (is_terminator(content)) {
            if (content == "." && guarded_period(tokens, i)) {
                boundary = false;
            } else if (i + 1 == tokens.size()) {
                boundary = true;
            } else if (has_leading_whitespace(tokens[i + 1])) {
                boundary = true;
            } else if (is_trailing_quote(token_content(tokens[i + 1]))) {
                // He said "stop."  -> boundary moves past the closing quote.
                if (i + 2 == tokens.size() || has_leading_whitespace(tokens[i + 2])) {
                    boundary_after[i + 1] = true;
                }
            }
        }
        if (!boundary && i + 1 < tokens.size() && has_leading_newline(tokens[i + 1])) {
            boundary = true;
        }
        if (boundary) {
            boundary_after[i] = true;
        }
    }
    boundary_after.back() = true;

    std::size_t begin = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!boundary_after[i]) continue;
        Sentence s;
        s.begin = begin;
        s.end = i + 1;
        for (std::size_t t = s.begin; t < s.end; ++t) {
            s.text += tokens[t];
        }
        sentences.push_back(std::move(s));
        begin = i + 1;
    }
    return sentences;
}

std::vector<ContextChunk> chunk_context(const TokenSequence& tokens,
                                        std::size_t chunk_size,
                                        const Tokenizer& tokenizer) {
    auto chunks = chunk_uniform(tokens, chunk_size, tokenizer);
    for (auto& chunk : chunks) {
        chunk.sentences = segment_sentences(chunk);
    }
    return chunks;
}

}  // namespace attnrag
