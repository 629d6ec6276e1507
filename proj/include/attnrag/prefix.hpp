#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "attnrag/tokenizer.hpp"

namespace attnrag {

struct Query {
    std::string text;
    std::string id;
};

enum class QueryKind { WhQuestion, YesNoQuestion, Other };

enum class PrefixKind { NonEmpty, Empty };
enum class PrefixOrigin { LlmGenerated, RuleBased };

/// An incomplete answer to the query, truncated just before the key word so
/// the next generated token is the answer's focal point. Empty for queries
/// that already fit next-token prediction (yes/no questions).
struct AnswerHintPrefix {
    std::string text;
    PrefixKind kind = PrefixKind::Empty;
    PrefixOrigin origin = PrefixOrigin::RuleBased;
    /// Diagnostic: the text ends like a finished sentence, which suggests the
    /// assistant returned a complete answer rather than a prefix. Passed
    /// through untruncated either way.
    bool looks_complete = false;
};

/// Classify by the query's leading word. Throws InvalidInputError when the
/// query is empty after trimming.
QueryKind classify_query(const Query& query);

/// Render the prefix-generation prompt with {question} replaced by the query
/// text. Everything outside the slot is byte-identical to the template; brace
/// characters inside the query pass through literally.
std::string build_prefix_prompt(const Query& query);

/// Interpret the assistant's reply: trim, strip one layer of surrounding
/// quotes, map a case-insensitive "None" (or an empty reply) to the empty
/// prefix. Throws MalformedPrefixError when the trimmed reply exceeds
/// `max_tokens` tokens.
AnswerHintPrefix parse_prefix_response(std::string_view raw,
                                       std::size_t max_tokens = 64);

/// Deterministic offline fallback: "Where is X?" becomes "X is in the";
/// everything else gets the empty prefix.
AnswerHintPrefix rule_based_prefix(const Query& query);

/// Source of answer hint prefixes for the pipeline.
class PrefixGenerator {
public:
    virtual ~PrefixGenerator() = default;
    virtual AnswerHintPrefix prefix_for(const Query& query) const = 0;
    virtual std::string name() const = 0;
};

class RuleBasedPrefixGenerator final : public PrefixGenerator {
public:
    AnswerHintPrefix prefix_for(const Query& query) const override {
        return rule_based_prefix(query);
    }
    std::string name() const override { return "rule"; }
};

class ChatClient;

/// Prompts a chat endpoint with the template above and parses the reply.
class ChatPrefixGenerator final : public PrefixGenerator {
public:
    ChatPrefixGenerator(std::shared_ptr<ChatClient> client,
                        std::size_t max_tokens = 64)
        : client_(std::move(client)), max_tokens_(max_tokens) {}

    AnswerHintPrefix prefix_for(const Query& query) const override;
    std::string name() const override { return "llm"; }

private:
    std::shared_ptr<ChatClient> client_;
    std::size_t max_tokens_;
};

}  // namespace attnrag
