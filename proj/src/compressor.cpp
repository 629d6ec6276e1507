#include "attnrag/compressor.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "attnrag/errors.hpp"

namespace attnrag {

namespace {

std::string trim_copy(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

bool is_irrelevant(const FocalToken& focal, const CompressorConfig& cfg) {
    std::string normalized;
    for (char ch : focal.text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            normalized.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    return normalized == cfg.none_literal;
}

std::vector<std::size_t> select_top_k(const AttentionFeatureVector& features,
                                      std::size_t k) {
    if (k == 0) {
        throw ConfigError("top_k must be >= 1");
    }
    const std::size_t n = features.scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (features.scores[a] != features.scores[b]) {
            return features.scores[a] > features.scores[b];
        }
        return a < b;  // ties: earlier position wins
    });
    order.resize(std::min(k, n));
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<Sentence> select_sentences(const std::vector<std::size_t>& positions,
                                       const std::vector<Sentence>& sentences) {
    std::vector<bool> selected(sentences.size(), false);
    for (const std::size_t pos : positions) {
        bool found = false;
        for (std::size_t s = 0; s < sentences.size(); ++s) {
            if (pos >= sentences[s].begin && pos < sentences[s].end) {
                selected[s] = true;
                found = true;
                break;
            }
        }
        if (!found) {
            throw InternalError("token position " + std::to_string(pos) +
                                " lies outside every sentence span");
        }
    }
    std::vector<Sentence> out;
    for (std::size_t s = 0; s < sentences.size(); ++s) {
        if (selected[s]) out.push_back(sentences[s]);
    }
    return out;
}

ChunkDecision compress_chunk(const ContextChunk& chunk,
                             const AttentionFeatureVector& features,
                             const FocalToken& focal,
                             const CompressorConfig& cfg) {
    ChunkDecision decision;
    decision.chunk_index = chunk.index;
    decision.focal_token = focal;

    if (is_irrelevant(focal, cfg)) {
        decision.skipped = true;
        return decision;
    }

    decision.selected_token_positions = select_top_k(features, cfg.top_k);
    decision.selected_sentences =
        select_sentences(decision.selected_token_positions, chunk.sentences);
    for (std::size_t i = 0; i < decision.selected_sentences.size(); ++i) {
        if (i > 0) decision.compressed_text += ' ';
        decision.compressed_text += trim_copy(decision.selected_sentences[i].text);
    }
    return decision;
}

std::string concat_compressed(const std::vector<ChunkDecision>& decisions) {
    std::string out;
    for (const auto& decision : decisions) {
        if (decision.compressed_text.empty()) continue;
        if (!out.empty()) out += '\n';
        out += decision.compressed_text;
    }
    return out;
}

}  // namespace attnrag
