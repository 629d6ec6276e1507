#include "attnrag/eval.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "attnrag/errors.hpp"
#include "attnrag/prompts.hpp"

namespace attnrag {

namespace {

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string substitute(std::string text, std::string_view slot,
                       std::string_view value) {
    const std::size_t at = text.find(slot);
    if (at != std::string::npos) {
        text.replace(at, slot.size(), value);
    }
    return text;
}

// Vocabulary of the synthetic task. Filler pools share no words with
// entities, locations, or movement verbs, so relevance is decidable by
// lexical overlap alone.
const std::vector<std::string> kEntities = {"Daniel", "Mary",  "John",
                                            "Sandra", "Fred",  "Julie",
                                            "Bill",   "Emily"};
const std::vector<std::string> kLocations = {
    "bathroom", "kitchen", "garden", "office", "hallway",
    "bedroom",  "cinema",  "park",   "school", "museum"};
const std::vector<std::string> kMoveVerbs = {"moved", "went", "journeyed",
                                             "travelled", "walked"};

const std::vector<std::string> kFillerOpeners = {
    "The",  "A",     "That", "Some", "Every", "Another",
    "Each", "This",  "One",  "No"};
const std::vector<std::string> kFillerNouns = {
    "breeze",  "clock",   "lantern", "curtain", "ledger",  "teapot",
    "sparrow", "shadow",  "door",    "window",  "carpet",  "candle",
    "radio",   "painting","staircase","chimney", "kettle",  "mirror"};
const std::vector<std::string> kFillerVerbs = {
    "rattled", "faded",   "glowed",   "creaked", "settled", "hummed",
    "swayed",  "waited",  "lingered", "dimmed",  "shivered","rested"};
const std::vector<std::string> kFillerTails = {
    "through the long afternoon",
    "for quite a while",
    "under a pale sky",
    "as evening drew near",
    "without anyone noticing",
    "in the usual manner",
    "against the cold draft",
    "beside the empty shelf",
    "during the quiet hours",
    "until the light changed"};

struct BabiFact {
    std::string entity;
    std::string verb;
    std::string location;

    std::string sentence() const {
        return entity + " " + verb + " to the " + location + ".";
    }
};

// Extract the subject of a "Where is X?" question; nullopt for other shapes.
std::optional<std::string> question_subject(const std::string& question,
                                            const Tokenizer& tokenizer) {
    std::vector<std::string> words;
    for (const auto& tok : tokenizer.encode(question)) {
        std::string w = token_word(tok);
        if (!w.empty()) words.push_back(std::move(w));
    }
    if (words.size() != 3 || words[0] != "where" || words[1] != "is") {
        return std::nullopt;
    }
    return words[2];
}

}  // namespace

std::string normalize_answer(std::string_view text) {
    std::string spaced;
    spaced.reserve(text.size());
    for (unsigned char c : text) {
        if (is_word_byte(c)) {
            spaced.push_back(static_cast<char>(std::tolower(c)));
        } else {
            spaced.push_back(' ');
        }
    }
    std::string out;
    std::size_t i = 0;
    while (i < spaced.size()) {
        while (i < spaced.size() && spaced[i] == ' ') ++i;
        std::size_t j = i;
        while (j < spaced.size() && spaced[j] != ' ') ++j;
        if (j > i) {
            const std::string_view word(spaced.data() + i, j - i);
            if (word != "a" && word != "an" && word != "the") {
                if (!out.empty()) out.push_back(' ');
                out.append(word);
            }
        }
        i = j;
    }
    return out;
}

int exact_match(std::string_view prediction,
                const std::vector<std::string>& golds) {
    const std::string norm = normalize_answer(prediction);
    for (const auto& gold : golds) {
        if (norm == normalize_answer(gold)) return 1;
    }
    return 0;
}

std::string random_baseline(const RetrievedContext& context, double target_ratio,
                            std::uint64_t seed, const Tokenizer& tokenizer) {
    if (!(target_ratio >= 1.0)) {
        throw InvalidInputError("random_baseline target_ratio must be >= 1");
    }
    std::string text = context.text();
    while (!text.empty() &&
           std::isspace(static_cast<unsigned char>(text.back()))) {
        text.pop_back();
    }
    const TokenSequence tokens = tokenizer.encode(text);
    const std::size_t n = tokens.size();
    if (n == 0) return "";
    const auto keep = static_cast<std::size_t>(
        std::ceil(static_cast<double>(n) / target_ratio));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Own Fisher-Yates: std::shuffle's draw sequence is
    // implementation-defined, and gen-data output must be reproducible.
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(order[i], order[rng() % (i + 1)]);
    }
    std::vector<std::size_t> kept(order.begin(),
                                  order.begin() + std::min(keep, n));
    std::sort(kept.begin(), kept.end());

    std::string out;
    for (std::size_t idx : kept) {
        const std::string& tok = tokens[idx];
        // Dropping the separator between two word tokens would fuse them into
        // one token; a space keeps the kept count exact.
        if (!out.empty() && is_word_byte(static_cast<unsigned char>(out.back())) &&
            is_word_byte(static_cast<unsigned char>(tok.front()))) {
            out.push_back(' ');
        }
        out.append(tok);
    }
    return out;
}

QASample generate_babi_sample(std::uint64_t seed, std::size_t target_tokens,
                              BabiTask task, const Tokenizer& tokenizer) {
    if (task != BabiTask::QA1) {
        throw ConfigError("unknown synthetic task");
    }
    if (target_tokens < 100) {
        throw InvalidInputError("generate_babi_sample needs target_tokens >= 100");
    }
    std::mt19937_64 rng(splitmix64(seed));
    auto pick = [&rng](const std::vector<std::string>& pool) -> const std::string& {
        return pool[rng() % pool.size()];
    };

    const std::string& subject = pick(kEntities);

    const std::size_t subject_moves = 2 + rng() % 3;
    std::vector<BabiFact> subject_facts;
    std::string last_location;
    for (std::size_t i = 0; i < subject_moves; ++i) {
        std::string location = pick(kLocations);
        while (location == last_location) location = pick(kLocations);
        subject_facts.push_back({subject, pick(kMoveVerbs), location});
        last_location = location;
    }
    const std::string gold = subject_facts.back().location;

    // Distractor moves by other entities; order among themselves is free,
    // only the subject's own order carries meaning.
    std::vector<BabiFact> facts = subject_facts;
    const std::size_t distractors = 2 + rng() % 4;
    for (std::size_t i = 0; i < distractors; ++i) {
        std::string entity = pick(kEntities);
        while (entity == subject) entity = pick(kEntities);
        BabiFact fact{entity, pick(kMoveVerbs), pick(kLocations)};
        facts.insert(facts.begin() + static_cast<std::ptrdiff_t>(
                                         rng() % (facts.size() + 1)),
                     fact);
    }

    std::size_t fact_tokens = 0;
    for (const auto& fact : facts) {
        fact_tokens += tokenizer.count(fact.sentence());
    }

    std::vector<std::string> fillers;
    std::size_t filler_tokens = 0;
    const std::size_t filler_budget =
        target_tokens > fact_tokens ? target_tokens - fact_tokens : 0;
    while (filler_tokens < filler_budget) {
        std::string sentence = pick(kFillerOpeners) + " " + pick(kFillerNouns) +
                               " " + pick(kFillerVerbs) + " " +
                               pick(kFillerTails) + ".";
        filler_tokens += tokenizer.count(sentence);
        fillers.push_back(std::move(sentence));
    }

    // Interleave: shuffle slot labels, then fill each kind in its own order
    // so the subject's move sequence stays chronological.
    std::vector<int> slots(facts.size() + fillers.size(), 0);
    std::fill(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(facts.size()), 1);
    for (std::size_t i = slots.size() - 1; i > 0; --i) {
        std::swap(slots[i], slots[rng() % (i + 1)]);
    }

    std::string text;
    std::size_t fact_at = 0, filler_at = 0;
    for (int slot : slots) {
        const std::string sentence =
            slot == 1 ? facts[fact_at++].sentence() : fillers[filler_at++];
        if (!text.empty()) text.push_back(' ');
        text.append(sentence);
    }

    QASample sample;
    sample.id = "qa1-" + std::to_string(seed);
    sample.question = "Where is " + subject + "?";
    sample.gold_answers = {gold};
    sample.context.documents = {text};
    sample.meta.corpus = "babilong-qa1";
    sample.meta.nominal_tokens = target_tokens;
    return sample;
}

std::optional<std::string> locate_answer(const std::string& text,
                                         const std::string& question) {
    WordTokenizer word_tokenizer;
    const auto subject = question_subject(question, word_tokenizer);
    if (!subject) return std::nullopt;

    std::vector<std::string> words;
    for (const auto& tok : word_tokenizer.encode(text)) {
        words.push_back(token_word(tok));
    }
    const auto is_verb = [](const std::string& w) {
        return std::find(kMoveVerbs.begin(), kMoveVerbs.end(), w) !=
               kMoveVerbs.end();
    };

    std::optional<std::string> answer;
    for (std::size_t i = 0; i + 4 < words.size(); ++i) {
        if (words[i] == *subject && is_verb(words[i + 1]) &&
            words[i + 2] == "to" && words[i + 3] == "the" &&
            !words[i + 4].empty()) {
            answer = words[i + 4];
        }
    }
    return answer;
}

std::string RuleLocationGenerator::answer(const std::string& question,
                                          const std::string& context) const {
    return locate_answer(context, question).value_or("unknown");
}

std::string ChatAnswerGenerator::answer(const std::string& question,
                                        const std::string& context) const {
    const std::string prompt =
        "Answer the question using only the provided context. Reply with the "
        "answer text alone.\n\nContext: " +
        context + "\n\nQuestion: " + question + "\nAnswer:";
    return trim(client_->complete(prompt));
}

std::optional<int> llm_judge(const std::string& question,
                             const std::string& prediction,
                             const std::string& gold, const JudgeConfig& cfg) {
    if (!cfg.client) return std::nullopt;
    std::string prompt(kJudgePromptTemplate);
    prompt = substitute(std::move(prompt), "{question}", question);
    prompt = substitute(std::move(prompt), "{gold}", gold);
    prompt = substitute(std::move(prompt), "{prediction}", prediction);

    const int attempts = std::max(1, cfg.max_attempts);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(cfg.backoff_ms * attempt));
        }
        try {
            const std::string verdict =
                normalize_answer(cfg.client->complete(prompt));
            if (verdict == "yes" || verdict.rfind("yes ", 0) == 0) return 1;
            if (verdict == "no" || verdict.rfind("no ", 0) == 0) return 0;
        } catch (const Error&) {
            // fall through to the next attempt
        }
    }
    return std::nullopt;
}

std::string_view method_name(Method method) {
    switch (method) {
        case Method::Original: return "original";
        case Method::Random: return "random";
        case Method::AttentionRag: return "attentionrag";
    }
    throw InternalError("unhandled method");
}

MethodSummary summarize(const std::vector<EvalRow>& rows,
                        std::string_view method,
                        std::optional<std::size_t> trial) {
    MethodSummary s;
    s.method = std::string(method);
    s.trial = trial;
    double em_sum = 0.0, judge_sum = 0.0, sentence_sum = 0.0;
    std::size_t judged = 0;
    std::size_t orig_sum = 0, compr_sum = 0;
    for (const auto& row : rows) {
        if (row.method != method) continue;
        if (trial && row.trial != *trial) continue;
        if (row.failed) {
            ++s.failed;
            continue;
        }
        ++s.rows;
        em_sum += row.em;
        sentence_sum += static_cast<double>(row.selected_sentences);
        if (row.judge) {
            judge_sum += *row.judge;
            ++judged;
        }
        if (row.compressed_tokens > 0) {
            orig_sum += row.original_tokens;
            compr_sum += row.compressed_tokens;
        }
    }
    if (s.rows > 0) {
        em_sum /= static_cast<double>(s.rows);
        sentence_sum /= static_cast<double>(s.rows);
        s.mean_em = em_sum;
        s.mean_selected_sentences = sentence_sum;
    }
    if (judged > 0) s.mean_judge = judge_sum / static_cast<double>(judged);
    if (compr_sum > 0) {
        s.aggregate_cr =
            static_cast<double>(orig_sum) / static_cast<double>(compr_sum);
    }
    return s;
}

EvalReport run_benchmark(const std::vector<QASample>& samples,
                         const Pipeline& pipeline,
                         const BenchmarkOptions& options) {
    if (!options.generator) {
        throw ConfigError("run_benchmark needs an answer generator");
    }
    if (options.repeat == 0) {
        throw ConfigError("repeat must be >= 1");
    }
    std::vector<Method> methods;
    for (Method m : options.methods) {
        if (std::find(methods.begin(), methods.end(), m) == methods.end()) {
            methods.push_back(m);
        }
    }
    if (methods.empty()) {
        throw ConfigError("run_benchmark needs at least one method");
    }
    const bool needs_attention =
        std::find(methods.begin(), methods.end(), Method::AttentionRag) !=
            methods.end() ||
        std::find(methods.begin(), methods.end(), Method::Random) !=
            methods.end();
    const Tokenizer& tokenizer = pipeline.tokenizer();
    const AnswerGenerator& generator = *options.generator;

    EvalReport report;
    report.seed = options.seed;
    report.repeat = options.repeat;

    for (std::size_t trial = 0; trial < options.repeat; ++trial) {
        const std::uint64_t trial_seed = options.seed + trial;
        for (const auto& sample : samples) {
            if (sample.gold_answers.empty()) {
                throw InvalidInputError("sample " + sample.id +
                                        " has no gold answers");
            }
            const Query query{sample.question, sample.id};

            std::optional<CompressionResult> attn;
            std::string attn_error;
            if (needs_attention) {
                try {
                    attn = pipeline.run(query, sample.context);
                } catch (const Error& e) {
                    attn_error = e.what();
                }
            }

            for (Method method : methods) {
                EvalRow row;
                row.method = std::string(method_name(method));
                row.trial = trial;
                row.sample_id = sample.id;
                try {
                    std::string compressed;
                    switch (method) {
                        case Method::Original: {
                            std::string text = sample.context.text();
                            while (!text.empty() &&
                                   std::isspace(static_cast<unsigned char>(
                                       text.back()))) {
                                text.pop_back();
                            }
                            compressed = std::move(text);
                            row.original_tokens = tokenizer.count(compressed);
                            row.compressed_tokens = row.original_tokens;
                            row.cr = compression_ratio(row.original_tokens,
                                                       row.compressed_tokens);
                            break;
                        }
                        case Method::AttentionRag: {
                            if (!attn) throw ProviderError(attn_error);
                            compressed = attn->compressed_text;
                            row.original_tokens = attn->original_token_count;
                            row.compressed_tokens = attn->compressed_token_count;
                            row.cr = attn->ratio;
                            for (const auto& d : attn->per_chunk) {
                                row.selected_sentences +=
                                    d.selected_sentences.size();
                            }
                            break;
                        }
                        case Method::Random: {
                            if (!attn) {
                                throw ProviderError(
                                    "matched ratio unavailable: " + attn_error);
                            }
                            const std::uint64_t row_seed =
                                splitmix64(trial_seed ^ fnv1a64(sample.id));
                            if (attn->ratio) {
                                compressed = random_baseline(
                                    sample.context, *attn->ratio, row_seed,
                                    tokenizer);
                            } else {
                                compressed = "";  // everything was skipped
                            }
                            row.original_tokens = attn->original_token_count;
                            row.compressed_tokens = tokenizer.count(compressed);
                            row.cr = compression_ratio(row.original_tokens,
                                                       row.compressed_tokens);
                            break;
                        }
                    }
                    const std::string prediction =
                        generator.answer(sample.question, compressed);
                    row.em = exact_match(prediction, sample.gold_answers);
                    if (options.judge) {
                        std::string gold = sample.gold_answers[0];
                        for (std::size_t g = 1; g < sample.gold_answers.size();
                             ++g) {
                            gold += "; " + sample.gold_answers[g];
                        }
                        row.judge = llm_judge(sample.question, prediction, gold,
                                              *options.judge);
                    }
                } catch (const Error& e) {
                    row.failed = true;
                    row.error = e.what();
                    row.em = 0;
                    row.cr = std::nullopt;
                }
                report.rows.push_back(std::move(row));
            }
        }
    }

    for (Method method : methods) {
        if (options.repeat > 1) {
            for (std::size_t trial = 0; trial < options.repeat; ++trial) {
                report.per_trial.push_back(
                    summarize(report.rows, method_name(method), trial));
            }
        }
        report.overall.push_back(
            summarize(report.rows, method_name(method), std::nullopt));
    }
    return report;
}

}  // namespace attnrag
