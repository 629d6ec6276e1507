#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "attnrag/eval.hpp"
#include "attnrag/pipeline.hpp"
#include "attnrag/prefix.hpp"

namespace attnrag {

/// Line-delimited QA records: one JSON object per line with keys
/// {id, question, answers, context, meta?}. `context` is either a single
/// string or an array of document strings; `meta` is {corpus, nominal_tokens}.
std::vector<QASample> parse_qa_samples(std::istream& in,
                                       const std::string& origin);
std::vector<QASample> read_qa_samples(const std::string& path);
void write_qa_samples(std::ostream& out, const std::vector<QASample>& samples);
void write_qa_samples(const std::string& path,
                      const std::vector<QASample>& samples);

/// One-line JSON record of a compression run: keys {id, query, prefix,
/// compressed_text, cr, per_chunk_summary}. Timings are diagnostics and are
/// deliberately not serialized.
std::string compression_record(const std::string& id, const Query& query,
                               const CompressionResult& result);

/// Line-delimited report: a header record carrying the seed, one record per
/// row, per-trial summaries when repeat > 1, then overall summaries.
void write_eval_report(std::ostream& out, const EvalReport& report);
void write_eval_report(const std::string& path, const EvalReport& report);

/// Plain-text summary table, one line per method: EM, Judge, CR, mean
/// selected sentences, row and failure counts.
std::string render_report_table(const EvalReport& report);

struct AblationRow {
    std::string axis_value;
    MethodSummary summary;
};

std::string render_ablation_table(const std::string& axis,
                                  const std::vector<AblationRow>& rows);

void write_ablation_report(std::ostream& out, const std::string& axis,
                           std::uint64_t seed,
                           const std::vector<AblationRow>& rows);

}  // namespace attnrag
