#include "attnrag/mock_provider.hpp"

#include <cmath>
#include <unordered_set>

#include "attnrag/errors.hpp"

namespace attnrag {

namespace {

const std::unordered_set<std::string>& query_stopwords() {
    static const std::unordered_set<std::string> set = {
        "who",  "what", "when",  "where", "which", "why",  "how",  "whose",
        "whom", "is",   "are",   "was",   "were",  "do",   "does", "did",
        "can",  "could", "will", "would", "has",   "have", "had",  "should",
        "may",  "might", "a",    "an",    "the",   "of",   "in",   "on",
        "at",   "to",    "for",  "and",   "or",
    };
    return set;
}

std::vector<std::string> content_words(const std::string& text,
                                       const Tokenizer& tokenizer) {
    std::vector<std::string> words;
    for (const auto& token : tokenizer.encode(text)) {
        std::string word = token_word(token);
        if (word.empty() || query_stopwords().count(word)) continue;
        words.push_back(std::move(word));
    }
    return words;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Uniform double in [0, 1) derived from the mixed key. Pure function of its
// inputs, so traces are reproducible regardless of call order.
double hash_unit(std::uint64_t seed, std::uint64_t prompt_hash, std::size_t layer,
                 std::size_t head, std::size_t position) {
    std::uint64_t key = seed;
    key = splitmix64(key ^ prompt_hash);
    key = splitmix64(key ^ (static_cast<std::uint64_t>(layer) << 40));
    key = splitmix64(key ^ (static_cast<std::uint64_t>(head) << 20));
    key = splitmix64(key ^ static_cast<std::uint64_t>(position));
    return static_cast<double>(key >> 11) * 0x1.0p-53;
}

}  // namespace

MockAttentionProvider::MockAttentionProvider(MockProviderConfig config)
    : config_(config) {
    if (config_.num_layers == 0 || config_.num_heads == 0) {
        throw ConfigError("mock provider needs at least one layer and head");
    }
}

ProviderResult MockAttentionProvider::decode_focal(const AnchorPrompt& prompt) const {
    const TokenSequence prompt_tokens = tokenizer_.encode(prompt.text);
    const std::size_t width = prompt_tokens.size();
    if (config_.max_prompt_tokens > 0 && width > config_.max_prompt_tokens) {
        throw OversizeChunkError("prompt of " + std::to_string(width) +
                                 " tokens exceeds mock context window of " +
                                 std::to_string(config_.max_prompt_tokens));
    }
    if (prompt.context_end > width || prompt.context_begin > prompt.context_end) {
        throw ProviderError("context range does not fit the prompt");
    }

    const std::vector<std::string> query_words =
        content_words(prompt.query_text, tokenizer_);

    // Focal token: last word of the last sentence containing the subject.
    ProviderResult result;
    result.prompt_token_count = width;
    result.focal.position = width;
    result.focal.text = "none";
    if (!query_words.empty()) {
        const std::string& subject = query_words.front();
        ContextChunk scratch;
        scratch.tokens = tokenizer_.encode(prompt.chunk_text);
        scratch.text = prompt.chunk_text;
        const auto sentences = segment_sentences(scratch);
        for (auto it = sentences.rbegin(); it != sentences.rend(); ++it) {
            bool has_subject = false;
            for (std::size_t t = it->begin; t < it->end; ++t) {
                if (token_word(scratch.tokens[t]) == subject) {
                    has_subject = true;
                    break;
                }
            }
            if (!has_subject) continue;
            for (std::size_t t = it->end; t-- > it->begin;) {
                const std::string word = token_word(scratch.tokens[t]);
                if (!word.empty()) {
                    result.focal.text = word;
                    break;
                }
            }
            break;
        }
    }

    // Overlap bonus for context tokens matching any query content word.
    std::vector<double> bonus(width, 0.0);
    for (std::size_t p = prompt.context_begin; p < prompt.context_end; ++p) {
        const std::string word = token_word(prompt_tokens[p]);
        if (word.empty()) continue;
        for (const auto& qw : query_words) {
            if (word == qw) {
                bonus[p] = config_.overlap_bonus;
                break;
            }
        }
    }

    const std::uint64_t prompt_hash = fnv1a(prompt.text);
    result.trace.layers.resize(config_.num_layers);
    for (std::size_t l = 0; l < config_.num_layers; ++l) {
        auto& heads = result.trace.layers[l];
        heads.resize(config_.num_heads);
        for (std::size_t h = 0; h < config_.num_heads; ++h) {
            auto& row = heads[h];
            row.resize(width);
            double max_logit = -1.0;
            for (std::size_t p = 0; p < width; ++p) {
                const double logit =
                    bonus[p] +
                    config_.jitter * hash_unit(config_.seed, prompt_hash, l, h, p);
                row[p] = logit;
                if (logit > max_logit) max_logit = logit;
            }
            double denom = 0.0;
            for (double& v : row) {
                v = std::exp(v - max_logit);
                denom += v;
            }
            for (double& v : row) v /= denom;
        }
    }
    return result;
}

}  // namespace attnrag
