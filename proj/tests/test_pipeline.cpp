#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <string>
#include <vector>

#include "attnrag/errors.hpp"
#include "attnrag/mock_provider.hpp"
#include "attnrag/pipeline.hpp"
#include "attnrag/tokenizer.hpp"

using namespace attnrag;

namespace {

std::shared_ptr<const Tokenizer> tok() { return make_tokenizer("word"); }

PipelineConfig small_config(std::size_t chunk_size = 8, std::size_t top_k = 3,
                            std::size_t batch_size = 4) {
    PipelineConfig cfg;
    cfg.chunk_size = chunk_size;
    cfg.compressor.top_k = top_k;
    cfg.batch_size = batch_size;
    return cfg;
}

Pipeline mock_pipeline(PipelineConfig cfg, std::uint64_t seed = 7,
                       std::size_t layers = 4, std::size_t heads = 2) {
    MockProviderConfig mock;
    mock.num_layers = layers;
    mock.num_heads = heads;
    mock.seed = seed;
    return Pipeline(tok(), std::make_shared<MockAttentionProvider>(mock),
                    std::make_shared<RuleBasedPrefixGenerator>(), cfg);
}

// Provider that fails on selected chunk indices and otherwise defers to the
// mock. Used to exercise the failure policies.
class FlakyProvider final : public AttentionProvider {
public:
    FlakyProvider(std::vector<std::size_t> bad_chunks)
        : bad_chunks_(std::move(bad_chunks)), inner_({4, 2, 7}) {}

    ProviderResult decode_focal(const AnchorPrompt& prompt) const override {
        for (const std::size_t bad : bad_chunks_) {
            if (prompt.chunk_index == bad) {
                throw ProviderError("synthetic outage");
            }
        }
        return inner_.decode_focal(prompt);
    }
    std::string name() const override { return "flaky"; }

private:
    std::vector<std::size_t> bad_chunks_;
    MockAttentionProvider inner_;
};

class ThrowingPrefixGenerator final : public PrefixGenerator {
public:
    AnswerHintPrefix prefix_for(const Query&) const override {
        throw ProviderError("assistant endpoint down");
    }
    std::string name() const override { return "throwing"; }
};

const std::string kStory =
    "Daniel moved to the kitchen. The weather was mild that day. "
    "Mary walked to the garden. Nothing else happened for a while. "
    "Daniel went to the park. The report was finished late.";

}  // namespace

TEST_CASE("compression ratio is original over compressed") {
    const auto r = compression_ratio(7003, 273);
    REQUIRE(r.has_value());
    CHECK(*r == doctest::Approx(25.65).epsilon(0.0004));
    const auto identity = compression_ratio(100, 100);
    REQUIRE(identity.has_value());
    CHECK(*identity == doctest::Approx(1.0));
    CHECK_FALSE(compression_ratio(100, 0).has_value());
    CHECK_FALSE(compression_ratio(0, 0).has_value());
}

TEST_CASE("constructor validates its settings") {
    CHECK_THROWS_AS(mock_pipeline(small_config(0)), ConfigError);
    CHECK_THROWS_AS(mock_pipeline(small_config(8, 0)), ConfigError);
    CHECK_THROWS_AS(mock_pipeline(small_config(8, 3, 0)), ConfigError);
}

TEST_CASE("empty context produces an empty result with null ratio") {
    const auto pipeline = mock_pipeline(small_config());
    const auto result = pipeline.run({"Where is Daniel?", "q"},
                                     RetrievedContext::from_text(""));
    CHECK(result.compressed_text.empty());
    CHECK(result.original_token_count == 0);
    CHECK(result.compressed_token_count == 0);
    CHECK_FALSE(result.ratio.has_value());
    CHECK(result.per_chunk.empty());
}

TEST_CASE("whitespace-only context is treated as empty") {
    const auto pipeline = mock_pipeline(small_config());
    const auto result = pipeline.run({"Where is Daniel?", "q"},
                                     RetrievedContext::from_text("  \n\t "));
    CHECK(result.original_token_count == 0);
    CHECK_FALSE(result.ratio.has_value());
}

TEST_CASE("fully irrelevant context compresses to nothing") {
    const auto pipeline = mock_pipeline(small_config());
    const auto result =
        pipeline.run({"Where is Zoltan?", "q"},
                     RetrievedContext::from_text(
                         "The weather was mild. Rain fell all week. "
                         "Markets closed early."));
    CHECK(result.compressed_text.empty());
    CHECK(result.compressed_token_count == 0);
    CHECK_FALSE(result.ratio.has_value());
    REQUIRE(!result.per_chunk.empty());
    for (const auto& decision : result.per_chunk) {
        CHECK(decision.skipped);
        CHECK(decision.compressed_text.empty());
    }
}

TEST_CASE("relevant sentences survive and the ratio exceeds one") {
    const auto pipeline = mock_pipeline(small_config(12, 2));
    const auto result = pipeline.run({"Where is Daniel?", "q"},
                                     RetrievedContext::from_text(kStory));
    CHECK(result.ratio.has_value());
    CHECK(*result.ratio > 1.0);
    CHECK(result.compressed_text.find("Daniel") != std::string::npos);
    CHECK(result.compressed_token_count <= result.original_token_count);
    CHECK(result.per_chunk.size() ==
          (result.original_token_count + 11) / 12);
    CHECK(result.prefix_used.text == "Daniel is in the");
}

TEST_CASE("per-chunk decisions cover every chunk in order") {
    const auto pipeline = mock_pipeline(small_config(6, 2));
    const auto result = pipeline.run({"Where is Daniel?", "q"},
                                     RetrievedContext::from_text(kStory));
    for (std::size_t i = 0; i < result.per_chunk.size(); ++i) {
        CHECK(result.per_chunk[i].chunk_index == i + 1);
    }
}

TEST_CASE("batched and sequential execution give identical content") {
    for (const std::size_t batch : {std::size_t{1}, std::size_t{3},
                                    std::size_t{7}, std::size_t{64}}) {
        const auto pipeline = mock_pipeline(small_config(6, 2, batch));
        const auto result = pipeline.run({"Where is Daniel?", "q"},
                                         RetrievedContext::from_text(kStory));
        const auto reference = mock_pipeline(small_config(6, 2, 1))
                                   .run({"Where is Daniel?", "q"},
                                        RetrievedContext::from_text(kStory));
        CHECK(result.compressed_text == reference.compressed_text);
        CHECK(result.compressed_token_count == reference.compressed_token_count);
    }
}

TEST_CASE("repeated runs are deterministic") {
    const auto pipeline = mock_pipeline(small_config(10, 3));
    const Query query{"Where is Mary?", "q"};
    const auto context = RetrievedContext::from_text(kStory);
    const auto first = pipeline.run(query, context);
    for (int i = 0; i < 3; ++i) {
        const auto again = pipeline.run(query, context);
        CHECK(again.compressed_text == first.compressed_text);
        CHECK(again.original_token_count == first.original_token_count);
        CHECK(again.compressed_token_count == first.compressed_token_count);
        CHECK(again.ratio == first.ratio);
        REQUIRE(again.per_chunk.size() == first.per_chunk.size());
        for (std::size_t c = 0; c < first.per_chunk.size(); ++c) {
            CHECK(again.per_chunk[c].skipped == first.per_chunk[c].skipped);
            CHECK(again.per_chunk[c].compressed_text ==
                  first.per_chunk[c].compressed_text);
            CHECK(again.per_chunk[c].focal_token.text ==
                  first.per_chunk[c].focal_token.text);
        }
    }
}

TEST_CASE("fail-fast propagates a provider error with the chunk index") {
    PipelineConfig cfg = small_config(6, 2, 1);
    cfg.failure_policy = ChunkFailurePolicy::FailFast;
    Pipeline pipeline(tok(), std::make_shared<FlakyProvider>(
                                 std::vector<std::size_t>{2}),
                      std::make_shared<RuleBasedPrefixGenerator>(), cfg);
    try {
        pipeline.run({"Where is Daniel?", "q"}, RetrievedContext::from_text(kStory));
        FAIL("expected ProviderError");
    } catch (const ProviderError& e) {
        REQUIRE(e.chunk_index.has_value());
        CHECK(*e.chunk_index == 2);
        CHECK(std::string(e.what()).find("chunk 2") != std::string::npos);
    }
}

TEST_CASE("skip policy turns failed chunks into skipped decisions") {
    PipelineConfig cfg = small_config(6, 2, 1);
    cfg.failure_policy = ChunkFailurePolicy::SkipChunkWithWarning;
    Pipeline pipeline(tok(), std::make_shared<FlakyProvider>(
                                 std::vector<std::size_t>{1, 3}),
                      std::make_shared<RuleBasedPrefixGenerator>(), cfg);
    const auto result = pipeline.run({"Where is Daniel?", "q"},
                                     RetrievedContext::from_text(kStory));
    REQUIRE(result.per_chunk.size() >= 3);
    CHECK(result.per_chunk[0].skipped);
    CHECK(result.per_chunk[2].skipped);
    std::size_t failure_warnings = 0;
    for (const auto& w : result.warnings) {
        if (w.find("provider failure") != std::string::npos) ++failure_warnings;
    }
    CHECK(failure_warnings == 2);
    // The healthy chunks still flow through.
    bool any_survivor = false;
    for (const auto& d : result.per_chunk) {
        if (!d.compressed_text.empty()) any_survivor = true;
    }
    CHECK(any_survivor);
}

TEST_CASE("a failing prefix generator falls back to the rule") {
    Pipeline pipeline(tok(), std::make_shared<MockAttentionProvider>(
                                 MockProviderConfig{4, 2, 7}),
                      std::make_shared<ThrowingPrefixGenerator>(), small_config());
    const auto result = pipeline.run({"Where is Daniel?", "q"},
                                     RetrievedContext::from_text(kStory));
    CHECK(result.prefix_used.text == "Daniel is in the");
    CHECK(result.prefix_used.origin == PrefixOrigin::RuleBased);
    REQUIRE(!result.warnings.empty());
    CHECK(result.warnings[0].find("prefix generation failed") != std::string::npos);
}

TEST_CASE("a boundary fragment selection is flagged in the warnings") {
    // Chunk size 4 slices mid-sentence; the fragment containing the subject is
    // selected and must be reported.
    const auto pipeline = mock_pipeline(small_config(4, 4));
    const auto result =
        pipeline.run({"Where is Daniel?", "q"},
                     RetrievedContext::from_text("Daniel went to the park."));
    bool flagged = false;
    for (const auto& w : result.warnings) {
        if (w.find("boundary fragment") != std::string::npos) flagged = true;
    }
    CHECK(flagged);
}

TEST_CASE("with_config reuses the parts and applies the new settings") {
    const auto pipeline = mock_pipeline(small_config(6, 2));
    const auto wider = pipeline.with_config(small_config(12, 5));
    CHECK(wider.config().chunk_size == 12);
    CHECK(wider.config().compressor.top_k == 5);
    CHECK(&wider.provider() == &pipeline.provider());
    CHECK(&wider.tokenizer() == &pipeline.tokenizer());
    const auto result = wider.run({"Where is Daniel?", "q"},
                                  RetrievedContext::from_text(kStory));
    CHECK(result.ratio.has_value());
}

TEST_CASE("timings cover the pipeline stages") {
    const auto pipeline = mock_pipeline(small_config());
    const auto result = pipeline.run({"Where is Daniel?", "q"},
                                     RetrievedContext::from_text(kStory));
    for (const char* stage : {"prefix", "tokenize", "chunk", "decode",
                              "compress", "total"}) {
        REQUIRE(result.timings_ms.count(stage) == 1);
        CHECK(result.timings_ms.at(stage) >= 0.0);
    }
}

TEST_CASE("larger top-k never shrinks the compressed output") {
    const auto base = mock_pipeline(small_config(12, 1));
    const Query query{"Where is Daniel?", "q"};
    const auto context = RetrievedContext::from_text(kStory);
    std::size_t previous = 0;
    for (const std::size_t k : {std::size_t{1}, std::size_t{3}, std::size_t{6},
                                std::size_t{12}}) {
        const auto result = base.with_config(small_config(12, k)).run(query, context);
        CHECK(result.compressed_token_count >= previous);
        previous = result.compressed_token_count;
    }
}
