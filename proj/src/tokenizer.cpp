#include "attnrag/tokenizer.hpp"

#include <cctype>

#include "attnrag/errors.hpp"

namespace attnrag {

namespace {

bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }

// Word bytes: ASCII alphanumerics plus every byte >= 0x80, so multi-byte
// UTF-8 sequences stay inside one token.
bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

}  // namespace

TokenSequence WordTokenizer::encode(std::string_view text) const {
    TokenSequence out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const std::size_t start = i;
        while (i < n && is_space_byte(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        if (i == n) {
            // Trailing whitespace with nothing after it.
            out.emplace_back(text.substr(start));
            break;
        }
        if (is_word_byte(static_cast<unsigned char>(text[i]))) {
            while (i < n && is_word_byte(static_cast<unsigned char>(text[i]))) {
                ++i;
            }
        } else {
            ++i;  // single punctuation byte
        }
        out.emplace_back(text.substr(start, i - start));
    }
    return out;
}

std::string WordTokenizer::decode(std::span<const std::string> tokens) const {
    std::string out;
    std::size_t total = 0;
    for (const auto& t : tokens) total += t.size();
    out.reserve(total);
    for (const auto& t : tokens) out += t;
    return out;
}

std::string_view token_content(std::string_view token) {
    std::size_t i = 0;
    while (i < token.size() && is_space_byte(static_cast<unsigned char>(token[i]))) {
        ++i;
    }
    return token.substr(i);
}

std::string token_word(std::string_view token) {
    std::string out;
    for (char ch : token_content(token)) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_word_byte(c)) {
            out.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    return out;
}

std::shared_ptr<const Tokenizer> make_tokenizer(const std::string& id) {
    if (id == "word" || id.empty()) {
        return std::make_shared<WordTokenizer>();
    }
    throw ConfigError("unknown tokenizer: " + id);
}

}  // namespace attnrag
