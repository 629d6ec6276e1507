#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace attnrag {

/// A token is an exact slice of the source text; concatenating a sequence in
/// order reproduces the text it was encoded from.
using TokenSequence = std::vector<std::string>;

class Tokenizer {
public:
    virtual ~Tokenizer() = default;

    virtual TokenSequence encode(std::string_view text) const = 0;
    virtual std::string decode(std::span<const std::string> tokens) const = 0;
    virtual std::string name() const = 0;

    std::size_t count(std::string_view text) const { return encode(text).size(); }
};

/// Lossless word-level tokenizer. Each token is a maximal run of word bytes
/// (alphanumerics and anything >= 0x80) or a single punctuation byte, with the
/// whitespace preceding it attached. Trailing whitespace at end of input forms
/// one final token, so decode(encode(x)) == x for every input.
class WordTokenizer final : public Tokenizer {
public:
    TokenSequence encode(std::string_view text) const override;
    std::string decode(std::span<const std::string> tokens) const override;
    std::string name() const override { return "word"; }
};

/// The token's text without its leading whitespace.
std::string_view token_content(std::string_view token);

/// Lowercased copy of the token's alphanumeric content, empty for punctuation
/// or whitespace tokens. Used for lexical matching and the "none" check.
std::string token_word(std::string_view token);

/// Factory for configured tokenizers. Currently only "word".
std::shared_ptr<const Tokenizer> make_tokenizer(const std::string& id);

}  // namespace attnrag
