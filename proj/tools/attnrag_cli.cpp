#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "attnrag/config.hpp"
#include "attnrag/errors.hpp"
#include "attnrag/records.hpp"

namespace {

using namespace attnrag;

struct Overrides {
    std::optional<std::string> preset;
    std::optional<std::size_t> chunk_size;
    std::optional<std::size_t> top_k;
    std::optional<std::size_t> batch_size;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> layer_range;
    std::optional<std::string> head_mode;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--preset", o.preset,
                    "corpus preset for chunk size and top-k");
    cmd->add_option("--chunk-size", o.chunk_size, "tokens per chunk (m)");
    cmd->add_option("--top-k", o.top_k, "attended tokens kept per chunk (k)");
    cmd->add_option("--batch-size", o.batch_size, "chunks per provider batch");
    cmd->add_option("--seed", o.seed,
                    "master seed (also seeds the mock provider)");
    cmd->add_option("--layer-range", o.layer_range,
                    "layers to aggregate: \"all\", \"N\", or \"LO-HI\"");
    cmd->add_option("--head-mode", o.head_mode, "\"mean\" or \"sum\"");
}

AppConfig configure(const std::string& config_path, const Overrides& o) {
    AppConfig cfg = config_path.empty() ? AppConfig{} : load_config(config_path);
    if (o.preset) apply_preset(cfg, *o.preset);
    if (o.chunk_size) cfg.pipeline.chunk_size = *o.chunk_size;
    if (o.top_k) cfg.pipeline.compressor.top_k = *o.top_k;
    if (o.batch_size) cfg.pipeline.batch_size = *o.batch_size;
    if (o.seed) {
        cfg.seed = *o.seed;
        cfg.provider.mock.seed = *o.seed;
    }
    if (o.layer_range) {
        cfg.pipeline.compressor.layer_range = parse_layer_range(*o.layer_range);
    }
    if (o.head_mode) {
        if (*o.head_mode == "mean") {
            cfg.pipeline.compressor.head_mode = HeadMode::Mean;
        } else if (*o.head_mode == "sum") {
            cfg.pipeline.compressor.head_mode = HeadMode::Sum;
        } else {
            throw ConfigError("--head-mode must be \"mean\" or \"sum\"");
        }
    }
    return cfg;
}

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidInputError(std::string("cannot open ") + what + ": " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidInputError("cannot open for writing: " + path);
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, ',')) {
        if (!part.empty()) parts.push_back(part);
    }
    return parts;
}

std::size_t parse_positive(const std::string& text, const char* what) {
    if (text.empty() ||
        !std::all_of(text.begin(), text.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; })) {
        throw ConfigError(std::string("bad ") + what + " value '" + text + "'");
    }
    const auto value = static_cast<std::size_t>(std::stoull(text));
    if (value == 0) {
        throw ConfigError(std::string(what) + " must be >= 1");
    }
    return value;
}

std::vector<QASample> corpus_or_synthetic(const std::string& corpus_path,
                                          const AppConfig& cfg) {
    if (!corpus_path.empty()) {
        auto samples = read_qa_samples(corpus_path);
        if (samples.empty()) {
            throw InvalidInputError("corpus is empty: " + corpus_path);
        }
        return samples;
    }
    auto tokenizer = make_tokenizer(cfg.tokenizer_id);
    std::vector<QASample> samples;
    samples.reserve(cfg.bench.count);
    for (std::size_t i = 0; i < cfg.bench.count; ++i) {
        samples.push_back(generate_babi_sample(cfg.seed + i, cfg.bench.tokens,
                                               BabiTask::QA1, *tokenizer));
    }
    return samples;
}

int run_compress(const std::string& config_path, const Overrides& overrides,
                 const std::string& query_text, const std::string& context_file,
                 const std::string& out_path, const std::string& id) {
    const AppConfig cfg = configure(config_path, overrides);
    const std::string context_text = read_file(context_file, "context file");

    Pipeline pipeline = build_pipeline(cfg);
    const Query query{query_text, id};
    RetrievedContext context;
    context.documents = {context_text};
    const CompressionResult result = pipeline.run(query, context);

    auto out = open_output(out_path);
    out << compression_record(id, query, result) << '\n';

    std::size_t skipped = 0;
    for (const auto& d : result.per_chunk) {
        if (d.skipped) ++skipped;
    }
    std::cerr << "cr="
              << (result.ratio ? std::to_string(*result.ratio)
                               : std::string("null"))
              << " skipped_chunks=" << skipped << "/" << result.per_chunk.size()
              << "\n";
    for (const auto& warning : result.warnings) {
        std::cerr << "warning: " << warning << "\n";
    }
    return 0;
}

int run_bench(const std::string& config_path, const Overrides& overrides,
              const std::string& corpus_path, const std::string& report_path,
              std::optional<std::size_t> repeat) {
    AppConfig cfg = configure(config_path, overrides);
    if (repeat) {
        if (*repeat == 0) throw ConfigError("--repeat must be >= 1");
        cfg.bench.repeat = *repeat;
    }
    const auto samples = read_qa_samples(corpus_path);
    if (samples.empty()) {
        throw InvalidInputError("corpus is empty: " + corpus_path);
    }

    Pipeline pipeline = build_pipeline(cfg);
    BenchmarkOptions options;
    options.methods = parse_methods(cfg.bench.methods);
    options.repeat = cfg.bench.repeat;
    options.seed = cfg.seed;
    options.generator = build_generator(cfg);
    options.judge = build_judge(cfg);

    const EvalReport report = run_benchmark(samples, pipeline, options);
    write_eval_report(report_path, report);
    std::cout << "seed=" << report.seed << " repeat=" << report.repeat
              << " provider=" << pipeline.provider().name() << "\n"
              << render_report_table(report);
    return 0;
}

int run_ablate(const std::string& config_path, const Overrides& overrides,
               const std::string& axis, const std::string& values_csv,
               const std::string& corpus_path, const std::string& report_path) {
    const AppConfig cfg = configure(config_path, overrides);
    if (axis != "layers" && axis != "chunk-size" && axis != "top-k") {
        throw ConfigError("unknown axis '" + axis +
                          "' (known: layers, chunk-size, top-k)");
    }
    const auto values = split_csv(values_csv);
    if (values.empty()) {
        throw ConfigError("--values needs a comma-separated list");
    }
    const auto samples = corpus_or_synthetic(corpus_path, cfg);

    Pipeline base = build_pipeline(cfg);
    BenchmarkOptions options;
    options.methods = {Method::AttentionRag};
    options.repeat = 1;
    options.seed = cfg.seed;
    options.generator = build_generator(cfg);
    options.judge = build_judge(cfg);

    std::vector<AblationRow> rows;
    for (const auto& value : values) {
        PipelineConfig pc = cfg.pipeline;
        if (axis == "layers") {
            pc.compressor.layer_range = parse_layer_range(value);
        } else if (axis == "chunk-size") {
            pc.chunk_size = parse_positive(value, "chunk-size");
        } else {
            pc.compressor.top_k = parse_positive(value, "top-k");
        }
        const Pipeline pipeline = base.with_config(pc);
        const EvalReport report = run_benchmark(samples, pipeline, options);
        rows.push_back({value, report.overall.at(0)});
    }

    std::cout << render_ablation_table(axis, rows);
    if (!report_path.empty()) {
        auto out = open_output(report_path);
        write_ablation_report(out, axis, cfg.seed, rows);
    }
    return 0;
}

int run_gen_data(std::uint64_t seed, std::size_t tokens, std::size_t count,
                 const std::string& out_path) {
    if (count == 0) {
        throw InvalidInputError("--count must be >= 1");
    }
    auto tokenizer = make_tokenizer("word");
    std::vector<QASample> samples;
    samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        samples.push_back(
            generate_babi_sample(seed + i, tokens, BabiTask::QA1, *tokenizer));
    }
    write_qa_samples(out_path, samples);
    std::cerr << "wrote " << samples.size() << " samples to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Attention-guided context compression for RAG prompts"};
    app.require_subcommand(1);

    std::string config_path, query_text, context_file, out_path, id = "cli";
    std::string corpus_path, report_path, axis, values_csv;
    std::optional<std::size_t> repeat;
    std::uint64_t gen_seed = 0;
    std::size_t gen_tokens = 1000, gen_count = 50;
    Overrides overrides;

    auto* compress = app.add_subcommand(
        "compress", "compress one context for one query");
    compress->add_option("--config,-c", config_path, "JSON config file");
    compress->add_option("--query,-q", query_text, "query text")->required();
    compress->add_option("--context-file", context_file, "context text file")
        ->required();
    compress->add_option("--out,-o", out_path, "output record file")->required();
    compress->add_option("--id", id, "record id");
    add_override_flags(compress, overrides);

    auto* bench =
        app.add_subcommand("bench", "run the benchmark over a corpus");
    bench->add_option("--config,-c", config_path, "JSON config file");
    bench->add_option("--corpus", corpus_path, "corpus record file")->required();
    bench->add_option("--report", report_path, "report output file")->required();
    bench->add_option("--repeat", repeat, "trials per sample");
    add_override_flags(bench, overrides);

    auto* ablate = app.add_subcommand(
        "ablate", "sweep one hyperparameter axis over the benchmark");
    ablate->add_option("--config,-c", config_path, "JSON config file");
    ablate->add_option("--axis", axis, "layers, chunk-size, or top-k")
        ->required();
    ablate->add_option("--values", values_csv, "comma-separated axis values")
        ->required();
    ablate->add_option("--corpus", corpus_path,
                       "corpus record file (default: synthetic)");
    ablate->add_option("--report", report_path, "report output file");
    add_override_flags(ablate, overrides);

    auto* gen = app.add_subcommand("gen-data",
                                   "generate a synthetic QA corpus");
    gen->add_option("--seed", gen_seed, "base seed");
    gen->add_option("--tokens", gen_tokens, "nominal tokens per context");
    gen->add_option("--count", gen_count, "number of samples");
    gen->add_option("--out,-o", out_path, "corpus output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (compress->parsed()) {
            return run_compress(config_path, overrides, query_text,
                                context_file, out_path, id);
        }
        if (bench->parsed()) {
            return run_bench(config_path, overrides, corpus_path, report_path,
                             repeat);
        }
        if (ablate->parsed()) {
            return run_ablate(config_path, overrides, axis, values_csv,
                              corpus_path, report_path);
        }
        if (gen->parsed()) {
            return run_gen_data(gen_seed, gen_tokens, gen_count, out_path);
        }
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidInputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
