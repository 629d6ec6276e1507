#include "attnrag/prefix.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "attnrag/chat_client.hpp"
#include "attnrag/errors.hpp"
#include "attnrag/prompts.hpp"

namespace attnrag {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string first_word(std::string_view text) {
    std::size_t b = 0;
    while (b < text.size() && !std::isalnum(static_cast<unsigned char>(text[b]))) ++b;
    std::size_t e = b;
    while (e < text.size() && std::isalnum(static_cast<unsigned char>(text[e]))) ++e;
    return lower(text.substr(b, e - b));
}

const std::unordered_set<std::string>& wh_words() {
    static const std::unordered_set<std::string> set = {
        "who", "what", "when", "where", "which", "why", "how", "whose", "whom",
    };
    return set;
}

const std::unordered_set<std::string>& yes_no_leads() {
    static const std::unordered_set<std::string> set = {
        "is", "are", "was", "were", "do", "does", "did", "can", "could",
        "will", "would", "has", "have", "had", "should", "may", "might",
    };
    return set;
}

std::string substitute_once(std::string_view tmpl, std::string_view slot,
                            std::string_view value) {
    std::string out(tmpl);
    const std::size_t pos = out.find(slot);
    if (pos != std::string::npos) {
        out.replace(pos, slot.size(), value);
    }
    return out;
}

bool ends_like_sentence(const std::string& text) {
    if (text.empty()) return false;
    const char last = text.back();
    return last == '.' || last == '!' || last == '?';
}

}  // namespace

QueryKind classify_query(const Query& query) {
    if (trim(query.text).empty()) {
        throw InvalidInputError("query text is empty");
    }
    const std::string lead = first_word(query.text);
    if (wh_words().count(lead)) return QueryKind::WhQuestion;
    if (yes_no_leads().count(lead)) return QueryKind::YesNoQuestion;
    return QueryKind::Other;
}

std::string build_prefix_prompt(const Query& query) {
    if (trim(query.text).empty()) {
        throw InvalidInputError("query text is empty");
    }
    return substitute_once(kPrefixPromptTemplate, "{question}", query.text);
}

AnswerHintPrefix parse_prefix_response(std::string_view raw, std::size_t max_tokens) {
    std::string text = trim(raw);

    if (max_tokens > 0) {
        const WordTokenizer tok;
        if (tok.count(text) > max_tokens) {
            throw MalformedPrefixError("assistant reply exceeds " +
                                       std::to_string(max_tokens) + " tokens");
        }
    }

    // Strip one layer of matching surrounding quotes, then re-trim.
    if (text.size() >= 2) {
        const char a = text.front();
        const char b = text.back();
        if ((a == '"' && b == '"') || (a == '\'' && b == '\'') ||
            (a == '`' && b == '`')) {
            text = trim(std::string_view(text).substr(1, text.size() - 2));
        }
    }

    AnswerHintPrefix prefix;
    prefix.origin = PrefixOrigin::LlmGenerated;
    if (text.empty() || lower(text) == "none") {
        prefix.kind = PrefixKind::Empty;
        return prefix;
    }
    prefix.kind = PrefixKind::NonEmpty;
    prefix.text = std::move(text);
    prefix.looks_complete = ends_like_sentence(prefix.text);
    return prefix;
}

AnswerHintPrefix rule_based_prefix(const Query& query) {
    const QueryKind kind = classify_query(query);
    AnswerHintPrefix prefix;
    prefix.origin = PrefixOrigin::RuleBased;
    if (kind != QueryKind::WhQuestion) {
        return prefix;
    }

    const std::string text = trim(query.text);
    const std::string lowered = lower(text);
    constexpr std::string_view kWhereIs = "where is ";
    if (lowered.rfind(kWhereIs, 0) == 0) {
        std::string subject = text.substr(kWhereIs.size());
        while (!subject.empty() &&
               (subject.back() == '?' ||
                std::isspace(static_cast<unsigned char>(subject.back())))) {
            subject.pop_back();
        }
        if (!subject.empty()) {
            prefix.kind = PrefixKind::NonEmpty;
            prefix.text = subject + " is in the";
        }
    }
    return prefix;
}

AnswerHintPrefix ChatPrefixGenerator::prefix_for(const Query& query) const {
    const std::string reply = client_->complete(build_prefix_prompt(query));
    return parse_prefix_response(reply, max_tokens_);
}

}  // namespace attnrag
