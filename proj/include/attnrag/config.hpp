#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "attnrag/chat_client.hpp"
#include "attnrag/eval.hpp"
#include "attnrag/http_provider.hpp"
#include "attnrag/mock_provider.hpp"
#include "attnrag/pipeline.hpp"

namespace attnrag {

struct ProviderSpec {
    std::string type = "mock";  // "mock" | "http"
    MockProviderConfig mock;
    HttpProviderOptions http;
};

/// Assistant endpoint used for answer hint prefix generation.
struct AssistantSpec {
    std::string type = "rule";  // "rule" | "http"
    HttpChatClient::Options http;
};

/// Downstream answer generator used by the benchmark harness.
struct GeneratorSpec {
    std::string type = "rule";  // "rule" | "http"
    HttpChatClient::Options http;
};

struct JudgeSpec {
    bool enabled = false;
    HttpChatClient::Options http;
    int max_attempts = 3;
    int backoff_ms = 250;
};

struct BenchSpec {
    std::size_t count = 50;    // synthetic samples when no corpus is given
    std::size_t tokens = 1000; // nominal context length per synthetic sample
    std::size_t repeat = 1;
    std::vector<std::string> methods = {"original", "random", "attentionrag"};
};

/// Full application configuration. A JSON config file is the source of truth;
/// CLI flags override individual keys. Credentials are never part of this
/// structure; HTTP clients read them from the named environment variables.
struct AppConfig {
    std::string tokenizer_id = "word";
    std::uint64_t seed = 0;
    PipelineConfig pipeline;
    ProviderSpec provider;
    AssistantSpec assistant;
    GeneratorSpec generator;
    JudgeSpec judge;
    BenchSpec bench;
};

/// Apply a named corpus preset (chunk size and top-k):
/// hotpotqa 300/12, 2wikimqa 300/15, triviaqa 150/8,
/// babilong-1k 50/8, babilong-2k 100/10, babilong-4k 200/12.
/// Unknown name → ConfigError.
void apply_preset(AppConfig& config, const std::string& name);
std::vector<std::string> preset_names();

/// "all" → nullopt (every layer); "lo-hi" or a single index → that range.
std::optional<LayerRange> parse_layer_range(const std::string& text);
std::string layer_range_name(const std::optional<LayerRange>& range);

/// Parse a JSON config document. Unknown keys are rejected. `origin` names
/// the source in error messages.
AppConfig parse_config(const std::string& json_text, const std::string& origin);
AppConfig load_config(const std::string& path);

std::vector<Method> parse_methods(const std::vector<std::string>& names);

Pipeline build_pipeline(const AppConfig& config);
std::shared_ptr<const AnswerGenerator> build_generator(const AppConfig& config);
std::optional<JudgeConfig> build_judge(const AppConfig& config);

}  // namespace attnrag
