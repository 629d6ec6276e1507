#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "attnrag/chat_client.hpp"
#include "attnrag/chunking.hpp"
#include "attnrag/pipeline.hpp"
#include "attnrag/tokenizer.hpp"

namespace attnrag {

struct SampleMeta {
    std::string corpus;
    std::size_t nominal_tokens = 0;
};

struct QASample {
    std::string id;
    std::string question;
    std::vector<std::string> gold_answers;  // at least one entry
    RetrievedContext context;
    SampleMeta meta;
};

/// Lowercase, strip punctuation, drop the articles a/an/the, collapse runs of
/// whitespace to single spaces. Standard QA answer normalization.
std::string normalize_answer(std::string_view text);

/// 1 iff the normalized prediction equals any normalized gold answer.
int exact_match(std::string_view prediction,
                const std::vector<std::string>& golds);

/// Keep a uniformly random subset of exactly ceil(n / target_ratio) tokens in
/// original order. target_ratio < 1 → InvalidInputError. Deterministic per
/// seed.
std::string random_baseline(const RetrievedContext& context, double target_ratio,
                            std::uint64_t seed, const Tokenizer& tokenizer);

enum class BabiTask { QA1 };

/// Synthesize a location-tracking QA sample: entity movement facts ("Daniel
/// moved to the park.") buried in filler prose, question "Where is X?", gold
/// answer = destination of X's last move. Context lands within 15% of
/// target_tokens under the given tokenizer. target_tokens < 100 →
/// InvalidInputError.
QASample generate_babi_sample(std::uint64_t seed, std::size_t target_tokens,
                              BabiTask task, const Tokenizer& tokenizer);

/// Rule oracle for the synthetic task: scan the text for movement facts about
/// the question's subject and return the last destination, or nullopt when no
/// fact about the subject survives in the text.
std::optional<std::string> locate_answer(const std::string& text,
                                         const std::string& question);

/// Produces an answer given the question and a (possibly compressed) context.
class AnswerGenerator {
public:
    virtual ~AnswerGenerator() = default;
    virtual std::string answer(const std::string& question,
                               const std::string& context) const = 0;
    virtual std::string name() const = 0;
};

/// Deterministic generator for the synthetic task: answers with the rule
/// oracle's location, or "unknown" when the fact is gone from the context.
class RuleLocationGenerator final : public AnswerGenerator {
public:
    std::string answer(const std::string& question,
                       const std::string& context) const override;
    std::string name() const override { return "rule"; }
};

/// Prompts a chat endpoint with question + context, greedy settings.
class ChatAnswerGenerator final : public AnswerGenerator {
public:
    explicit ChatAnswerGenerator(std::shared_ptr<ChatClient> client)
        : client_(std::move(client)) {}

    std::string answer(const std::string& question,
                       const std::string& context) const override;
    std::string name() const override { return "chat"; }

private:
    std::shared_ptr<ChatClient> client_;
};

struct JudgeConfig {
    std::shared_ptr<ChatClient> client;
    int max_attempts = 3;
    int backoff_ms = 250;
};

/// Ask the judge endpoint whether the prediction answers the question given
/// the gold answer. Retries with linear backoff; an unparseable or failing
/// verdict after max_attempts yields nullopt.
std::optional<int> llm_judge(const std::string& question,
                             const std::string& prediction,
                             const std::string& gold, const JudgeConfig& cfg);

enum class Method { Original, Random, AttentionRag };

std::string_view method_name(Method method);

struct BenchmarkOptions {
    std::vector<Method> methods = {Method::Original, Method::Random,
                                   Method::AttentionRag};
    std::size_t repeat = 1;
    std::uint64_t seed = 0;
    std::shared_ptr<const AnswerGenerator> generator;
    std::optional<JudgeConfig> judge;
};

struct EvalRow {
    std::string method;
    std::size_t trial = 0;
    std::string sample_id;
    int em = 0;
    std::optional<int> judge;
    std::optional<double> cr;
    std::size_t original_tokens = 0;
    std::size_t compressed_tokens = 0;
    std::size_t selected_sentences = 0;
    bool failed = false;
    std::string error;
};

struct MethodSummary {
    std::string method;
    std::optional<std::size_t> trial;  // null when pooled across trials
    double mean_em = 0.0;
    std::optional<double> mean_judge;
    std::optional<double> aggregate_cr;  // Σ original / Σ compressed, skipping
                                         // fully-compressed-away rows
    double mean_selected_sentences = 0.0;
    std::size_t rows = 0;    // rows entering the aggregates
    std::size_t failed = 0;  // rows excluded from the aggregates
};

struct EvalReport {
    std::uint64_t seed = 0;
    std::size_t repeat = 1;
    std::vector<EvalRow> rows;
    std::vector<MethodSummary> per_trial;  // one per (method, trial), repeat > 1
    std::vector<MethodSummary> overall;    // one per method
};

/// Run every configured method over every sample, `repeat` times with trial
/// seeds seed+0, seed+1, ... The random baseline is matched per sample to the
/// ratio the attention method actually achieved in the same trial. A failing
/// sample yields a row with failed=true that is excluded from aggregates.
EvalReport run_benchmark(const std::vector<QASample>& samples,
                         const Pipeline& pipeline,
                         const BenchmarkOptions& options);

/// Recompute a summary from rows (pooled, or restricted to one trial).
MethodSummary summarize(const std::vector<EvalRow>& rows,
                        std::string_view method,
                        std::optional<std::size_t> trial);

}  // namespace attnrag
