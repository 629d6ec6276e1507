#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "attnrag/chat_client.hpp"
#include "attnrag/errors.hpp"
#include "attnrag/prefix.hpp"
#include "attnrag/prompts.hpp"

using namespace attnrag;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos;
         pos = hay.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("query classification by leading word") {
    CHECK(classify_query({"Where is Daniel?", "q"}) == QueryKind::WhQuestion);
    CHECK(classify_query({"Who wrote it?", "q"}) == QueryKind::WhQuestion);
    CHECK(classify_query({"  which film came first?", "q"}) == QueryKind::WhQuestion);
    CHECK(classify_query({"Is Tom here?", "q"}) == QueryKind::YesNoQuestion);
    CHECK(classify_query({"Did they win?", "q"}) == QueryKind::YesNoQuestion);
    CHECK(classify_query({"Explain the plot.", "q"}) == QueryKind::Other);
    CHECK_THROWS_AS(classify_query({"", "q"}), InvalidInputError);
    CHECK_THROWS_AS(classify_query({"   \n", "q"}), InvalidInputError);
}

TEST_CASE("prompt keeps the template and splices the query once at the end") {
    const Query query{"Where is Daniel?", "q"};
    const std::string prompt = build_prefix_prompt(query);

    CHECK(prompt.find("Format: Daniel is in the") != std::string::npos);

    const std::string tail = "Question: Where is Daniel?\nFormat:";
    REQUIRE(prompt.size() >= tail.size());
    CHECK(prompt.substr(prompt.size() - tail.size()) == tail);

    // Splice oracle: the prompt must equal template text around the slot.
    const std::string tmpl(kPrefixPromptTemplate);
    const std::size_t slot = tmpl.find("{question}");
    REQUIRE(slot != std::string::npos);
    CHECK(prompt.substr(0, slot) == tmpl.substr(0, slot));
    CHECK(prompt.substr(slot + query.text.size()) == tmpl.substr(slot + 10));

    // The query appears exactly once after the final example block.
    const std::size_t marker = prompt.rfind("Now, here's a new question:");
    REQUIRE(marker != std::string::npos);
    CHECK(count_occurrences(prompt.substr(marker), query.text) == 1);
}

TEST_CASE("braces in the query pass through literally") {
    const Query query{"What does {x} mean?", "q"};
    const std::string prompt = build_prefix_prompt(query);
    CHECK(prompt.find("Question: What does {x} mean?\nFormat:") != std::string::npos);
}

TEST_CASE("empty query is rejected by prompt construction") {
    CHECK_THROWS_AS(build_prefix_prompt({"", "q"}), InvalidInputError);
}

TEST_CASE("parsing a plain prefix reply") {
    const auto p = parse_prefix_response("Daniel is in the");
    CHECK(p.kind == PrefixKind::NonEmpty);
    CHECK(p.text == "Daniel is in the");
    CHECK(p.origin == PrefixOrigin::LlmGenerated);
    CHECK_FALSE(p.looks_complete);
}

TEST_CASE("None replies map to the empty prefix") {
    CHECK(parse_prefix_response("None").kind == PrefixKind::Empty);
    CHECK(parse_prefix_response("  none \n").kind == PrefixKind::Empty);
    CHECK(parse_prefix_response("NONE").kind == PrefixKind::Empty);
    CHECK(parse_prefix_response("").kind == PrefixKind::Empty);
    CHECK(parse_prefix_response("None").text.empty());
}

TEST_CASE("one layer of surrounding quotes is stripped") {
    CHECK(parse_prefix_response("\"Daniel is in the\"").text == "Daniel is in the");
    CHECK(parse_prefix_response("'It is'").text == "It is");
    CHECK(parse_prefix_response("\"None\"").kind == PrefixKind::Empty);
    // Mismatched quotes stay.
    CHECK(parse_prefix_response("\"Daniel is in the'").text ==
          "\"Daniel is in the'");
}

TEST_CASE("overlong replies are malformed") {
    std::string longreply;
    for (int i = 0; i < 70; ++i) longreply += "word ";
    CHECK_THROWS_AS(parse_prefix_response(longreply), MalformedPrefixError);
    // At the limit it still parses.
    std::string at_limit;
    for (int i = 0; i < 64; ++i) at_limit += (i ? " w" : "w");
    CHECK(parse_prefix_response(at_limit).kind == PrefixKind::NonEmpty);
}

TEST_CASE("a reply ending like a finished sentence is flagged, not truncated") {
    const auto p = parse_prefix_response("Daniel is in the park.");
    CHECK(p.kind == PrefixKind::NonEmpty);
    CHECK(p.text == "Daniel is in the park.");
    CHECK(p.looks_complete);
}

TEST_CASE("nonempty parses never return empty text") {
    for (const char* raw : {"a", " b ", "\"c\"", "x."}) {
        const auto p = parse_prefix_response(raw);
        REQUIRE(p.kind == PrefixKind::NonEmpty);
        CHECK(!p.text.empty());
    }
}

TEST_CASE("rule fallback handles the location pattern and nothing else") {
    const auto where = rule_based_prefix({"Where is Daniel?", "q"});
    CHECK(where.kind == PrefixKind::NonEmpty);
    CHECK(where.text == "Daniel is in the");
    CHECK(where.origin == PrefixOrigin::RuleBased);

    CHECK(rule_based_prefix({"Where is Mary Jane?", "q"}).text ==
          "Mary Jane is in the");
    CHECK(rule_based_prefix({"Is Tom here?", "q"}).kind == PrefixKind::Empty);
    CHECK(rule_based_prefix({"Explain the plot.", "q"}).kind == PrefixKind::Empty);
    // Wh question outside the pattern: empty prefix, not an error.
    CHECK(rule_based_prefix({"Why is it so?", "q"}).kind == PrefixKind::Empty);
}

TEST_CASE("chat generator pipes the prompt through the client and parses") {
    auto client = std::make_shared<FnChatClient>([](const std::string& prompt) {
        REQUIRE(prompt.find("Question: Where is Daniel?\nFormat:") !=
                std::string::npos);
        return std::string("  \"Daniel is in the\"  ");
    });
    ChatPrefixGenerator gen(client);
    const auto p = gen.prefix_for({"Where is Daniel?", "q"});
    CHECK(p.kind == PrefixKind::NonEmpty);
    CHECK(p.text == "Daniel is in the");
    CHECK(p.origin == PrefixOrigin::LlmGenerated);
}

TEST_CASE("prompt templates match their asset files byte for byte") {
#ifdef ATTNRAG_ASSET_DIR
    const char* dir = ATTNRAG_ASSET_DIR;
#else
    const char* dir = std::getenv("ATTNRAG_ASSET_DIR");
#endif
    REQUIRE(dir != nullptr);
    const std::string base(dir);
    CHECK(read_file(base + "/prefix_prompt.txt") == std::string(kPrefixPromptTemplate));
    CHECK(read_file(base + "/anchor_prompt.txt") == std::string(kAnchorPromptTemplate));
}
