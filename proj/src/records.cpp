#include "attnrag/records.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "attnrag/errors.hpp"

namespace attnrag {

namespace {

using json = nlohmann::ordered_json;

json parse_line(const std::string& line, const std::string& origin,
                std::size_t line_no) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw InvalidInputError(origin + ":" + std::to_string(line_no) +
                                ": not a JSON object");
    }
    return j;
}

std::string require_string(const json& j, const char* key,
                           const std::string& where) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw InvalidInputError(where + ": missing string field '" + key + "'");
    }
    return j[key].get<std::string>();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidInputError("cannot open for writing: " + path);
    }
    return out;
}

json summary_json(const char* record, const MethodSummary& s) {
    json j;
    j["record"] = record;
    j["method"] = s.method;
    if (s.trial) j["trial"] = *s.trial;
    j["mean_em"] = s.mean_em;
    if (s.mean_judge) j["mean_judge"] = *s.mean_judge; else j["mean_judge"] = nullptr;
    if (s.aggregate_cr) j["aggregate_cr"] = *s.aggregate_cr; else j["aggregate_cr"] = nullptr;
    j["mean_selected_sentences"] = s.mean_selected_sentences;
    j["rows"] = s.rows;
    j["failed"] = s.failed;
    return j;
}

std::string fmt(double v, int precision = 3) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v, int precision = 3) {
    return v ? fmt(*v, precision) : std::string("-");
}

void pad_to(std::string& s, std::size_t width) {
    while (s.size() < width) s.push_back(' ');
}

std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& cells) {
    std::vector<std::size_t> widths(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) widths[c] = header[c].size();
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::string out;
    auto emit = [&](const std::vector<std::string>& row) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::string cell = row[c];
            if (c + 1 < row.size()) pad_to(cell, widths[c] + 2);
            line += cell;
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line;
        out.push_back('\n');
    };
    emit(header);
    for (const auto& row : cells) emit(row);
    return out;
}

}  // namespace

std::vector<QASample> parse_qa_samples(std::istream& in,
                                       const std::string& origin) {
    std::vector<QASample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        const json j = parse_line(line, origin, line_no);

        QASample sample;
        sample.id = require_string(j, "id", where);
        sample.question = require_string(j, "question", where);

        if (!j.contains("answers") || !j["answers"].is_array() ||
            j["answers"].empty()) {
            throw InvalidInputError(where +
                                    ": 'answers' must be a non-empty array");
        }
        for (const auto& a : j["answers"]) {
            if (!a.is_string()) {
                throw InvalidInputError(where + ": 'answers' entries must be strings");
            }
            sample.gold_answers.push_back(a.get<std::string>());
        }

        if (!j.contains("context")) {
            throw InvalidInputError(where + ": missing 'context'");
        }
        if (j["context"].is_string()) {
            sample.context.documents = {j["context"].get<std::string>()};
        } else if (j["context"].is_array()) {
            for (const auto& d : j["context"]) {
                if (!d.is_string()) {
                    throw InvalidInputError(where +
                                            ": 'context' entries must be strings");
                }
                sample.context.documents.push_back(d.get<std::string>());
            }
        } else {
            throw InvalidInputError(where +
                                    ": 'context' must be a string or array");
        }

        if (j.contains("meta") && j["meta"].is_object()) {
            const auto& meta = j["meta"];
            if (meta.contains("corpus") && meta["corpus"].is_string()) {
                sample.meta.corpus = meta["corpus"].get<std::string>();
            }
            if (meta.contains("nominal_tokens") &&
                meta["nominal_tokens"].is_number_unsigned()) {
                sample.meta.nominal_tokens =
                    meta["nominal_tokens"].get<std::size_t>();
            }
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

std::vector<QASample> read_qa_samples(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidInputError("cannot open corpus: " + path);
    }
    return parse_qa_samples(in, path);
}

void write_qa_samples(std::ostream& out, const std::vector<QASample>& samples) {
    for (const auto& sample : samples) {
        json j;
        j["id"] = sample.id;
        j["question"] = sample.question;
        j["answers"] = sample.gold_answers;
        if (sample.context.documents.size() == 1) {
            j["context"] = sample.context.documents[0];
        } else {
            j["context"] = sample.context.documents;
        }
        j["meta"] = {{"corpus", sample.meta.corpus},
                     {"nominal_tokens", sample.meta.nominal_tokens}};
        out << j.dump() << '\n';
    }
}

void write_qa_samples(const std::string& path,
                      const std::vector<QASample>& samples) {
    auto out = open_out(path);
    write_qa_samples(out, samples);
}

std::string compression_record(const std::string& id, const Query& query,
                               const CompressionResult& result) {
    json j;
    j["id"] = id;
    j["query"] = query.text;
    j["prefix"] = result.prefix_used.text;
    j["compressed_text"] = result.compressed_text;
    if (result.ratio) j["cr"] = *result.ratio; else j["cr"] = nullptr;
    json chunks = json::array();
    for (const auto& d : result.per_chunk) {
        json c;
        c["chunk"] = d.chunk_index;
        c["skipped"] = d.skipped;
        c["focal"] = d.focal_token.text;
        c["sentences"] = d.selected_sentences.size();
        chunks.push_back(std::move(c));
    }
    j["per_chunk_summary"] = std::move(chunks);
    return j.dump();
}

void write_eval_report(std::ostream& out, const EvalReport& report) {
    json header;
    header["record"] = "header";
    header["seed"] = report.seed;
    header["repeat"] = report.repeat;
    out << header.dump() << '\n';

    for (const auto& row : report.rows) {
        json j;
        j["record"] = "row";
        j["method"] = row.method;
        j["trial"] = row.trial;
        j["sample_id"] = row.sample_id;
        j["em"] = row.em;
        if (row.judge) j["judge"] = *row.judge; else j["judge"] = nullptr;
        if (row.cr) j["cr"] = *row.cr; else j["cr"] = nullptr;
        j["original_tokens"] = row.original_tokens;
        j["compressed_tokens"] = row.compressed_tokens;
        j["selected_sentences"] = row.selected_sentences;
        j["failed"] = row.failed;
        if (row.failed) j["error"] = row.error;
        out << j.dump() << '\n';
    }
    for (const auto& s : report.per_trial) {
        out << summary_json("trial_summary", s).dump() << '\n';
    }
    for (const auto& s : report.overall) {
        out << summary_json("summary", s).dump() << '\n';
    }
}

void write_eval_report(const std::string& path, const EvalReport& report) {
    auto out = open_out(path);
    write_eval_report(out, report);
}

std::string render_report_table(const EvalReport& report) {
    std::vector<std::vector<std::string>> cells;
    for (const auto& s : report.overall) {
        cells.push_back({s.method, fmt(s.mean_em), fmt_opt(s.mean_judge),
                         fmt_opt(s.aggregate_cr, 2),
                         fmt(s.mean_selected_sentences, 1),
                         std::to_string(s.rows), std::to_string(s.failed)});
    }
    return render_table(
        {"method", "EM", "Judge", "CR", "sentences", "rows", "failed"}, cells);
}

std::string render_ablation_table(const std::string& axis,
                                  const std::vector<AblationRow>& rows) {
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : rows) {
        const auto& s = row.summary;
        cells.push_back({row.axis_value, fmt(s.mean_em),
                         fmt_opt(s.mean_judge), fmt_opt(s.aggregate_cr, 2),
                         fmt(s.mean_selected_sentences, 1),
                         std::to_string(s.rows), std::to_string(s.failed)});
    }
    return render_table(
        {axis, "EM", "Judge", "CR", "sentences", "rows", "failed"}, cells);
}

void write_ablation_report(std::ostream& out, const std::string& axis,
                           std::uint64_t seed,
                           const std::vector<AblationRow>& rows) {
    json header;
    header["record"] = "header";
    header["axis"] = axis;
    header["seed"] = seed;
    out << header.dump() << '\n';
    for (const auto& row : rows) {
        json j;
        j["record"] = "ablation_row";
        j["value"] = row.axis_value;
        const MethodSummary& s = row.summary;
        j["method"] = s.method;
        j["mean_em"] = s.mean_em;
        if (s.mean_judge) j["mean_judge"] = *s.mean_judge; else j["mean_judge"] = nullptr;
        if (s.aggregate_cr) j["aggregate_cr"] = *s.aggregate_cr; else j["aggregate_cr"] = nullptr;
        j["mean_selected_sentences"] = s.mean_selected_sentences;
        j["rows"] = s.rows;
        j["failed"] = s.failed;
        out << j.dump() << '\n';
    }
}

}  // namespace attnrag
