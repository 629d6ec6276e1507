#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "attnrag/errors.hpp"
#include "attnrag/records.hpp"

using namespace attnrag;
using json = nlohmann::json;

namespace {

QASample sample_of(const std::string& id, const std::string& question,
                   std::vector<std::string> answers,
                   std::vector<std::string> documents) {
    QASample s;
    s.id = id;
    s.question = question;
    s.gold_answers = std::move(answers);
    s.context.documents = std::move(documents);
    s.meta.corpus = "demo";
    s.meta.nominal_tokens = 42;
    return s;
}

}  // namespace

TEST_CASE("qa samples survive a write and parse round trip") {
    std::vector<QASample> samples = {
        sample_of("a", "Where is Daniel?", {"park"}, {"Daniel is in the park."}),
        sample_of("b", "Who won?", {"Ilona", "Zrinyi"},
                  {"doc one text.", "doc two text."}),
    };
    std::stringstream buf;
    write_qa_samples(buf, samples);

    const auto parsed = parse_qa_samples(buf, "mem");
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].id == "a");
    CHECK(parsed[0].question == "Where is Daniel?");
    CHECK(parsed[0].gold_answers == std::vector<std::string>{"park"});
    REQUIRE(parsed[0].context.documents.size() == 1);
    CHECK(parsed[0].context.documents[0] == "Daniel is in the park.");
    CHECK(parsed[0].meta.corpus == "demo");
    CHECK(parsed[0].meta.nominal_tokens == 42);
    REQUIRE(parsed[1].context.documents.size() == 2);
    CHECK(parsed[1].gold_answers.size() == 2);
}

TEST_CASE("a single-document context serializes as a plain string") {
    std::stringstream buf;
    write_qa_samples(buf, {sample_of("a", "q?", {"x"}, {"only doc"})});
    const auto j = json::parse(buf.str());
    CHECK(j["context"].is_string());

    std::stringstream buf2;
    write_qa_samples(buf2, {sample_of("a", "q?", {"x"}, {"d1", "d2"})});
    CHECK(json::parse(buf2.str())["context"].is_array());
}

TEST_CASE("blank lines in a corpus are skipped") {
    std::stringstream in;
    in << "\n"
       << R"({"id":"a","question":"q?","answers":["x"],"context":"text"})" << "\n"
       << "   \n";
    const auto parsed = parse_qa_samples(in, "mem");
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].id == "a");
}

TEST_CASE("corpus validation errors name the origin and line") {
    auto expect_error = [](const std::string& line, const char* needle) {
        std::stringstream in;
        in << line << "\n";
        try {
            parse_qa_samples(in, "corpus.jsonl");
            FAIL("expected InvalidInputError for: " << line);
        } catch (const InvalidInputError& e) {
            const std::string what = e.what();
            CHECK(what.find("corpus.jsonl:1") != std::string::npos);
            CHECK(what.find(needle) != std::string::npos);
        }
    };
    expect_error("not json at all", "not a JSON object");
    expect_error("[1, 2]", "not a JSON object");
    expect_error(R"({"question":"q?","answers":["x"],"context":"t"})", "id");
    expect_error(R"({"id":"a","answers":["x"],"context":"t"})", "question");
    expect_error(R"({"id":"a","question":"q?","context":"t"})", "answers");
    expect_error(R"({"id":"a","question":"q?","answers":[],"context":"t"})",
                 "answers");
    expect_error(R"({"id":"a","question":"q?","answers":[3],"context":"t"})",
                 "answers");
    expect_error(R"({"id":"a","question":"q?","answers":["x"]})", "context");
    expect_error(R"({"id":"a","question":"q?","answers":["x"],"context":7})",
                 "context");
}

TEST_CASE("missing corpus files are reported by path") {
    try {
        read_qa_samples("/nonexistent/corpus.jsonl");
        FAIL("expected InvalidInputError");
    } catch (const InvalidInputError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/corpus.jsonl") !=
              std::string::npos);
    }
}

TEST_CASE("compression records carry exactly the documented keys") {
    CompressionResult result;
    result.compressed_text = "Daniel is in the park.";
    result.original_token_count = 100;
    result.compressed_token_count = 6;
    result.ratio = 100.0 / 6.0;
    result.prefix_used.text = "Daniel is in the";
    result.timings_ms["total"] = 12.5;
    ChunkDecision kept;
    kept.chunk_index = 1;
    kept.focal_token.text = "park";
    kept.selected_sentences.push_back({"Daniel is in the park.", 0, 6});
    ChunkDecision skipped;
    skipped.chunk_index = 2;
    skipped.skipped = true;
    skipped.focal_token.text = "none";
    result.per_chunk = {kept, skipped};

    const auto line = compression_record("rec1", {"Where is Daniel?", "q"}, result);
    const auto j = json::parse(line);

    std::set<std::string> keys;
    for (const auto& item : j.items()) keys.insert(item.key());
    CHECK(keys == std::set<std::string>{"id", "query", "prefix",
                                        "compressed_text", "cr",
                                        "per_chunk_summary"});

    CHECK(j["id"] == "rec1");
    CHECK(j["query"] == "Where is Daniel?");
    CHECK(j["prefix"] == "Daniel is in the");
    CHECK(j["compressed_text"] == "Daniel is in the park.");
    CHECK(j["cr"].get<double>() == doctest::Approx(100.0 / 6.0));
    REQUIRE(j["per_chunk_summary"].size() == 2);
    CHECK(j["per_chunk_summary"][0]["chunk"] == 1);
    CHECK(j["per_chunk_summary"][0]["skipped"] == false);
    CHECK(j["per_chunk_summary"][0]["focal"] == "park");
    CHECK(j["per_chunk_summary"][0]["sentences"] == 1);
    CHECK(j["per_chunk_summary"][1]["skipped"] == true);
}

TEST_CASE("a null ratio serializes as JSON null") {
    CompressionResult result;
    const auto j = json::parse(compression_record("r", {"q?", "q"}, result));
    CHECK(j["cr"].is_null());
}

TEST_CASE("eval reports start with a header carrying seed and repeat") {
    EvalReport report;
    report.seed = 77;
    report.repeat = 2;
    EvalRow row;
    row.method = "original";
    row.sample_id = "s1";
    row.em = 1;
    row.cr = 1.0;
    report.rows = {row};
    MethodSummary summary;
    summary.method = "original";
    summary.mean_em = 1.0;
    summary.rows = 1;
    report.overall = {summary};
    MethodSummary trial = summary;
    trial.trial = 0;
    report.per_trial = {trial};

    std::stringstream out;
    write_eval_report(out, report);

    std::string line;
    REQUIRE(std::getline(out, line));
    const auto header = json::parse(line);
    CHECK(header["record"] == "header");
    CHECK(header["seed"] == 77);
    CHECK(header["repeat"] == 2);

    REQUIRE(std::getline(out, line));
    const auto jrow = json::parse(line);
    CHECK(jrow["record"] == "row");
    CHECK(jrow["method"] == "original");
    CHECK(jrow["em"] == 1);
    CHECK(jrow["judge"].is_null());
    CHECK(!jrow.contains("error"));

    REQUIRE(std::getline(out, line));
    CHECK(json::parse(line)["record"] == "trial_summary");
    REQUIRE(std::getline(out, line));
    const auto jsummary = json::parse(line);
    CHECK(jsummary["record"] == "summary");
    CHECK(jsummary["mean_em"].get<double>() == doctest::Approx(1.0));
    CHECK_FALSE(std::getline(out, line));
}

TEST_CASE("failed rows carry their error text") {
    EvalReport report;
    EvalRow row;
    row.method = "attentionrag";
    row.sample_id = "s1";
    row.failed = true;
    row.error = "provider went away";
    report.rows = {row};

    std::stringstream out;
    write_eval_report(out, report);
    std::string line;
    std::getline(out, line);  // header
    REQUIRE(std::getline(out, line));
    const auto j = json::parse(line);
    CHECK(j["failed"] == true);
    CHECK(j["error"] == "provider went away");
    CHECK(j["cr"].is_null());
}

TEST_CASE("the report table has one line per method") {
    EvalReport report;
    MethodSummary a;
    a.method = "original";
    a.mean_em = 1.0;
    a.aggregate_cr = 1.0;
    a.rows = 50;
    MethodSummary b;
    b.method = "attentionrag";
    b.mean_em = 0.9;
    b.aggregate_cr = 18.18;
    b.mean_selected_sentences = 8.0;
    b.rows = 50;
    report.overall = {a, b};

    const auto table = render_report_table(report);
    CHECK(table.find("method") != std::string::npos);
    CHECK(table.find("original") != std::string::npos);
    CHECK(table.find("attentionrag") != std::string::npos);
    CHECK(table.find("18.18") != std::string::npos);
    CHECK(table.find("0.900") != std::string::npos);
    // Null judge renders as a dash.
    CHECK(table.find("-") != std::string::npos);
}

TEST_CASE("ablation output labels rows with the axis value") {
    MethodSummary s;
    s.method = "attentionrag";
    s.mean_em = 0.8;
    s.aggregate_cr = 12.0;
    s.rows = 10;
    std::vector<AblationRow> rows = {{"0-10", s}, {"11-20", s}};

    const auto table = render_ablation_table("layers", rows);
    CHECK(table.find("layers") != std::string::npos);
    CHECK(table.find("0-10") != std::string::npos);
    CHECK(table.find("11-20") != std::string::npos);

    std::stringstream out;
    write_ablation_report(out, "layers", 7, rows);
    std::string line;
    REQUIRE(std::getline(out, line));
    const auto header = json::parse(line);
    CHECK(header["record"] == "header");
    CHECK(header["axis"] == "layers");
    CHECK(header["seed"] == 7);
    std::size_t count = 0;
    while (std::getline(out, line)) {
        const auto j = json::parse(line);
        CHECK(j["record"] == "ablation_row");
        CHECK(j.contains("value"));
        CHECK(j.contains("mean_selected_sentences"));
        ++count;
    }
    CHECK(count == 2);
}
