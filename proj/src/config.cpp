#include "attnrag/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "attnrag/errors.hpp"
#include "attnrag/prefix.hpp"

namespace attnrag {

namespace {

using json = nlohmann::json;

struct Preset {
    const char* name;
    std::size_t chunk_size;
    std::size_t top_k;
};

// Per-corpus defaults; overridable by explicit keys.
constexpr Preset kPresets[] = {
    {"hotpotqa", 300, 12},   {"2wikimqa", 300, 15},  {"triviaqa", 150, 8},
    {"babilong-1k", 50, 8},  {"babilong-2k", 100, 10},
    {"babilong-4k", 200, 12},
};

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
                return key == a;
            }) == allowed.end()) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
void read_field(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j[key].get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": invalid value for '" + std::string(key) + "'");
    }
}

void read_chat_options(const json& j, HttpChatClient::Options& out,
                       const std::string& where) {
    read_field(j, "base_url", out.base_url, where);
    read_field(j, "model", out.model, where);
    read_field(j, "api_key_env", out.api_key_env, where);
    read_field(j, "path", out.path, where);
    read_field(j, "timeout_seconds", out.timeout_seconds, where);
    read_field(j, "temperature", out.temperature, where);
}

HeadMode parse_head_mode(const std::string& text, const std::string& where) {
    if (text == "mean") return HeadMode::Mean;
    if (text == "sum") return HeadMode::Sum;
    throw ConfigError(where + ": head_mode must be \"mean\" or \"sum\"");
}

ChunkFailurePolicy parse_failure_policy(const std::string& text,
                                        const std::string& where) {
    if (text == "fail-fast") return ChunkFailurePolicy::FailFast;
    if (text == "skip-chunk" || text == "skip-chunk-with-warning") {
        return ChunkFailurePolicy::SkipChunkWithWarning;
    }
    throw ConfigError(where +
                      ": failure_policy must be \"fail-fast\" or \"skip-chunk\"");
}

}  // namespace

void apply_preset(AppConfig& config, const std::string& name) {
    for (const auto& preset : kPresets) {
        if (name == preset.name) {
            config.pipeline.chunk_size = preset.chunk_size;
            config.pipeline.compressor.top_k = preset.top_k;
            return;
        }
    }
    std::string known;
    for (const auto& preset : kPresets) {
        if (!known.empty()) known += ", ";
        known += preset.name;
    }
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& preset : kPresets) names.emplace_back(preset.name);
    return names;
}

std::optional<LayerRange> parse_layer_range(const std::string& text) {
    std::string t;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            t.push_back(static_cast<char>(
                std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (t == "all" || t.empty()) return std::nullopt;
    const auto parse_index = [&](const std::string& part) -> std::size_t {
        if (part.empty() ||
            !std::all_of(part.begin(), part.end(), [](unsigned char c) {
                return std::isdigit(c) != 0;
            })) {
            throw ConfigError("bad layer range '" + text +
                              "' (want \"all\", \"N\", or \"LO-HI\")");
        }
        return static_cast<std::size_t>(std::stoull(part));
    };
    const std::size_t dash = t.find('-');
    LayerRange range;
    if (dash == std::string::npos) {
        range.lo = range.hi = parse_index(t);
    } else {
        range.lo = parse_index(t.substr(0, dash));
        range.hi = parse_index(t.substr(dash + 1));
    }
    if (range.lo > range.hi) {
        throw ConfigError("bad layer range '" + text + "': lo > hi");
    }
    return range;
}

std::string layer_range_name(const std::optional<LayerRange>& range) {
    if (!range) return "all";
    if (range->lo == range->hi) return std::to_string(range->lo);
    return std::to_string(range->lo) + "-" + std::to_string(range->hi);
}

AppConfig parse_config(const std::string& json_text, const std::string& origin) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ConfigError(origin + ": not a JSON object");
    }
    reject_unknown_keys(j,
                        {"preset", "seed", "tokenizer", "chunk_size", "top_k",
                         "layer_range", "head_mode", "none_literal",
                         "batch_size", "failure_policy", "provider",
                         "assistant", "generator", "judge", "bench"},
                        origin);

    AppConfig config;
    if (j.contains("preset")) {
        if (!j["preset"].is_string()) {
            throw ConfigError(origin + ": 'preset' must be a string");
        }
        apply_preset(config, j["preset"].get<std::string>());
    }
    read_field(j, "seed", config.seed, origin);
    read_field(j, "tokenizer", config.tokenizer_id, origin);
    read_field(j, "chunk_size", config.pipeline.chunk_size, origin);
    read_field(j, "top_k", config.pipeline.compressor.top_k, origin);
    read_field(j, "none_literal", config.pipeline.compressor.none_literal, origin);
    read_field(j, "batch_size", config.pipeline.batch_size, origin);
    if (j.contains("layer_range")) {
        if (!j["layer_range"].is_string()) {
            throw ConfigError(origin + ": 'layer_range' must be a string");
        }
        config.pipeline.compressor.layer_range =
            parse_layer_range(j["layer_range"].get<std::string>());
    }
    if (j.contains("head_mode")) {
        if (!j["head_mode"].is_string()) {
            throw ConfigError(origin + ": 'head_mode' must be a string");
        }
        config.pipeline.compressor.head_mode =
            parse_head_mode(j["head_mode"].get<std::string>(), origin);
    }
    if (j.contains("failure_policy")) {
        if (!j["failure_policy"].is_string()) {
            throw ConfigError(origin + ": 'failure_policy' must be a string");
        }
        config.pipeline.failure_policy =
            parse_failure_policy(j["failure_policy"].get<std::string>(), origin);
    }

    if (j.contains("provider")) {
        const auto& p = j["provider"];
        const std::string where = origin + ".provider";
        if (!p.is_object()) throw ConfigError(where + ": must be an object");
        reject_unknown_keys(p,
                            {"type", "num_layers", "num_heads", "seed",
                             "overlap_bonus", "jitter", "max_prompt_tokens",
                             "base_url", "path", "model", "api_key_env",
                             "timeout_seconds"},
                            where);
        read_field(p, "type", config.provider.type, where);
        read_field(p, "num_layers", config.provider.mock.num_layers, where);
        read_field(p, "num_heads", config.provider.mock.num_heads, where);
        read_field(p, "overlap_bonus", config.provider.mock.overlap_bonus, where);
        read_field(p, "jitter", config.provider.mock.jitter, where);
        read_field(p, "max_prompt_tokens", config.provider.mock.max_prompt_tokens,
                   where);
        if (p.contains("seed")) {
            read_field(p, "seed", config.provider.mock.seed, where);
        } else {
            config.provider.mock.seed = config.seed;
        }
        read_field(p, "base_url", config.provider.http.base_url, where);
        read_field(p, "path", config.provider.http.path, where);
        read_field(p, "model", config.provider.http.model, where);
        read_field(p, "api_key_env", config.provider.http.api_key_env, where);
        read_field(p, "timeout_seconds", config.provider.http.timeout_seconds,
                   where);
    } else {
        config.provider.mock.seed = config.seed;
    }

    const auto read_endpoint = [&](const char* key, std::string& type,
                                   HttpChatClient::Options& http) {
        if (!j.contains(key)) return;
        const auto& e = j[key];
        const std::string where = origin + "." + key;
        if (!e.is_object()) throw ConfigError(where + ": must be an object");
        reject_unknown_keys(e,
                            {"type", "base_url", "model", "api_key_env", "path",
                             "timeout_seconds", "temperature"},
                            where);
        read_field(e, "type", type, where);
        read_chat_options(e, http, where);
    };
    read_endpoint("assistant", config.assistant.type, config.assistant.http);
    read_endpoint("generator", config.generator.type, config.generator.http);

    if (j.contains("judge")) {
        const auto& e = j["judge"];
        const std::string where = origin + ".judge";
        if (!e.is_object()) throw ConfigError(where + ": must be an object");
        reject_unknown_keys(e,
                            {"enabled", "base_url", "model", "api_key_env",
                             "path", "timeout_seconds", "temperature",
                             "max_attempts", "backoff_ms"},
                            where);
        read_field(e, "enabled", config.judge.enabled, where);
        read_chat_options(e, config.judge.http, where);
        read_field(e, "max_attempts", config.judge.max_attempts, where);
        read_field(e, "backoff_ms", config.judge.backoff_ms, where);
    }

    if (j.contains("bench")) {
        const auto& b = j["bench"];
        const std::string where = origin + ".bench";
        if (!b.is_object()) throw ConfigError(where + ": must be an object");
        reject_unknown_keys(b, {"count", "tokens", "repeat", "methods"}, where);
        read_field(b, "count", config.bench.count, where);
        read_field(b, "tokens", config.bench.tokens, where);
        read_field(b, "repeat", config.bench.repeat, where);
        read_field(b, "methods", config.bench.methods, where);
    }
    return config;
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path);
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<Method> methods;
    for (const auto& name : names) {
        if (name == "original") methods.push_back(Method::Original);
        else if (name == "random") methods.push_back(Method::Random);
        else if (name == "attentionrag") methods.push_back(Method::AttentionRag);
        else throw ConfigError("unknown method '" + name +
                               "' (known: original, random, attentionrag)");
    }
    return methods;
}

Pipeline build_pipeline(const AppConfig& config) {
    auto tokenizer = make_tokenizer(config.tokenizer_id);

    std::shared_ptr<const AttentionProvider> provider;
    if (config.provider.type == "mock") {
        provider = std::make_shared<MockAttentionProvider>(config.provider.mock);
    } else if (config.provider.type == "http") {
        provider = std::make_shared<HttpAttentionProvider>(config.provider.http);
    } else {
        throw ConfigError("unknown provider type '" + config.provider.type +
                          "' (known: mock, http)");
    }

    std::shared_ptr<const PrefixGenerator> prefix;
    if (config.assistant.type == "rule") {
        prefix = std::make_shared<RuleBasedPrefixGenerator>();
    } else if (config.assistant.type == "http") {
        prefix = std::make_shared<ChatPrefixGenerator>(
            std::make_shared<HttpChatClient>(config.assistant.http));
    } else {
        throw ConfigError("unknown assistant type '" + config.assistant.type +
                          "' (known: rule, http)");
    }

    return Pipeline(std::move(tokenizer), std::move(provider), std::move(prefix),
                    config.pipeline);
}

std::shared_ptr<const AnswerGenerator> build_generator(const AppConfig& config) {
    if (config.generator.type == "rule") {
        return std::make_shared<RuleLocationGenerator>();
    }
    if (config.generator.type == "http") {
        return std::make_shared<ChatAnswerGenerator>(
            std::make_shared<HttpChatClient>(config.generator.http));
    }
    throw ConfigError("unknown generator type '" + config.generator.type +
                      "' (known: rule, http)");
}

std::optional<JudgeConfig> build_judge(const AppConfig& config) {
    if (!config.judge.enabled) return std::nullopt;
    JudgeConfig judge;
    judge.client = std::make_shared<HttpChatClient>(config.judge.http);
    judge.max_attempts = config.judge.max_attempts;
    judge.backoff_ms = config.judge.backoff_ms;
    return judge;
}

}  // namespace attnrag
