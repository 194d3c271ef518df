#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "bioqa/runner.hpp"

using namespace bioqa;
using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

// Synthetic BioASQ-format dataset: 40 questions over all four types, one of
// them with no usable snippets.
fs::path write_dataset() {
    nlohmann::json questions = nlohmann::json::array();
    const char* topics[] = {"alpha", "beta", "gamma", "delta", "epsilon"};
    for (int i = 0; i < 40; ++i) {
        nlohmann::json q;
        q["id"] = "syn" + std::to_string(i);
        const std::string topic = topics[i % 5];
        const std::string other = topics[(i + 2) % 5];
        q["body"] = "What does " + topic + " regulate in cells?";
        if (i == 17) {
            q["snippets"] = nlohmann::json::array();  // skipped at run time
        } else {
            q["snippets"] = {
                nlohmann::json{{"text", topic + " regulates " + other + " signaling. It was " +
                                             "observed in many tissues."}},
                nlohmann::json{{"text", "Some studies also link " + topic + " to " + topic +
                                             " feedback. Yes, the " + other + " pathway responds."}},
            };
        }
        q["ideal_answer"] = {topic + " regulates " + other + " signaling in most tissues."};
        switch (i % 4) {
            case 0: q["type"] = "summary"; break;
            case 1:
                q["type"] = "yesno";
                q["exact_answer"] = "yes";
                break;
            case 2:
                q["type"] = "factoid";
                q["exact_answer"] = {topic + " signaling", std::string(topic)};
                break;
            case 3:
                q["type"] = "list";
                q["exact_answer"] = {{std::string(topic)}, {std::string(other)}};
                break;
        }
        questions.push_back(q);
    }
    const fs::path path = fs::temp_directory_path() / "bioqa_synthetic.json";
    std::ofstream out(path, std::ios::binary);
    out << nlohmann::json{{"questions", questions}}.dump(1);
    return path;
}

RunConfig base_config(const fs::path& data, const fs::path& out_dir) {
    RunConfig cfg;
    cfg.data = data;
    cfg.seed = 12;
    cfg.partition = Partition::dev;
    cfg.features = {FeatureKind::parse("jaccard"), FeatureKind::parse("tf")};
    cfg.selectors = {selector_parse("greedy"), selector_parse("mmr-l0.5")};
    cfg.k_values = {1, 2, 3};
    cfg.out_dir = out_dir;
    return cfg;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("selector ids parse and format") {
    CHECK(selector_id(selector_parse("greedy")) == "greedy");
    CHECK(selector_id(selector_parse("mmr")) == "mmr-l0.5");
    CHECK(selector_id(selector_parse("mmr-l0.3")) == "mmr-l0.3");
    CHECK(selector_parse("mmr-l0.3").lambda == 0.3);
    CHECK_THROWS_AS(selector_parse("best"), std::invalid_argument);
    CHECK_THROWS_AS(selector_parse("mmr-l1.5"), std::invalid_argument);
}

TEST_CASE("run config validation") {
    RunConfig cfg = base_config("x.json", "out");
    CHECK_NOTHROW(cfg.validate());
    RunConfig bad = cfg;
    bad.features.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.selectors.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.k_values = {0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.k_values = {51};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.threads = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("run config json round-trip") {
    RunConfig cfg = base_config("data/some file.json", "out/dir");
    cfg.word_budget = 120;
    cfg.stopwords = "stop.txt";
    cfg.threads = 3;
    cfg.features.push_back(FeatureKind::parse("root:tfidf:0.2"));
    const RunConfig back = RunConfig::from_json(cfg.to_json());
    CHECK(back == cfg);

    RunConfig minimal = base_config("d.json", "o");
    CHECK(RunConfig::from_json(minimal.to_json()) == minimal);
}

TEST_CASE("run_experiment produces the sweep grid") {
    const fs::path data = write_dataset();
    const RunConfig cfg = base_config(data, fs::temp_directory_path() / "bioqa_run_grid");
    const ExperimentReport report = run_experiment(cfg);

    // dev partition of 40 questions = 8; one question in the whole set has
    // no snippets, so the grid covers the dev questions that have pools.
    std::size_t dev_total = 0;
    for (const auto& [_, count] : report.partition_type_counts) dev_total += count;
    CHECK(dev_total == 8);
    const std::size_t evaluated = dev_total - report.skipped;
    CHECK(report.rows.size() == evaluated * 2 * 2 * 3);

    // rows sorted by (qid, feature, selector, k)
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const auto& a = report.rows[i - 1];
        const auto& b = report.rows[i];
        CHECK(std::tie(a.qid, a.feature, a.selector, a.k) <= std::tie(b.qid, b.feature, b.selector, b.k));
    }

    for (const QuestionScore& row : report.rows) {
        if (row.qtype == QuestionType::summary) {
            CHECK_FALSE(row.soft_hit.has_value());
        } else {
            REQUIRE(row.soft_hit.has_value());
            if (*row.hard_hit) CHECK(*row.soft_hit);
        }
        CHECK(row.rouge.f1 >= 0.0);
        CHECK(row.rouge.f1 <= 1.0);
    }
}

TEST_CASE("run_experiment is deterministic and thread-count independent") {
    const fs::path data = write_dataset();
    RunConfig cfg = base_config(data, fs::temp_directory_path() / "bioqa_run_det");
    cfg.features = {FeatureKind::parse("combined")};
    cfg.k_values = {1, 2};

    const ExperimentReport once = run_experiment(cfg);
    RunConfig threaded = cfg;
    threaded.threads = 4;
    const ExperimentReport many = run_experiment(threaded);
    REQUIRE(once.rows.size() == many.rows.size());
    for (std::size_t i = 0; i < once.rows.size(); ++i) {
        CHECK(once.rows[i].qid == many.rows[i].qid);
        CHECK(once.rows[i].rouge.f1 == many.rows[i].rouge.f1);
        CHECK(once.rows[i].rouge.recall == many.rows[i].rouge.recall);
    }
}

TEST_CASE("emit_report writes recomputable tables") {
    const fs::path data = write_dataset();
    const fs::path out = fs::temp_directory_path() / "bioqa_report";
    fs::remove_all(out);
    const RunConfig cfg = base_config(data, out);
    const ExperimentReport report = run_experiment(cfg);
    const auto files = emit_report(report, out);
    CHECK(files.size() >= 5);
    for (const fs::path& f : files) CHECK(fs::exists(f));

    // run.json reloads to the identical config
    nlohmann::json run = nlohmann::json::parse(slurp(out / "run.json"));
    CHECK(RunConfig::from_json(run["config"]) == cfg);
    CHECK(run["result"]["skipped"].get<std::size_t>() == report.skipped);

    // per-question rows survive the CSV round trip
    const auto rows = read_question_scores(out / "per_question.csv");
    REQUIRE(rows.size() == report.rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].qid == report.rows[i].qid);
        CHECK(rows[i].k == report.rows[i].k);
        CHECK(rows[i].rouge.precision == report.rows[i].rouge.precision);
        CHECK(rows[i].rouge.recall == report.rows[i].rouge.recall);
        CHECK(rows[i].rouge.f1 == report.rows[i].rouge.f1);
        CHECK(rows[i].soft_hit == report.rows[i].soft_hit);
        CHECK(rows[i].hard_hit == report.rows[i].hard_hit);
    }

    // rouge_by_k.csv matches a recomputation from the CSV rows to 1e-12
    std::ifstream in(out / "rouge_by_k.csv");
    std::string line;
    std::getline(in, line);  // header
    std::size_t aggregate_rows = 0;
    while (std::getline(in, line)) {
        const auto fields = bioqa::detail::csv_split(line);
        REQUIRE(fields.size() == 8);
        const auto qtype = question_type_from(fields[0]);
        double p = 0, r = 0, f = 0;
        std::size_t n = 0;
        for (const auto& row : rows) {
            if (row.qtype == *qtype && row.feature == fields[1] && row.selector == fields[2] &&
                row.k == std::stoull(fields[3])) {
                ++n;
                p += row.rouge.precision;
                r += row.rouge.recall;
                f += row.rouge.f1;
            }
        }
        REQUIRE(n == std::stoull(fields[4]));
        CHECK_THAT(p / double(n), WithinAbs(std::strtod(fields[5].c_str(), nullptr), 1e-12));
        CHECK_THAT(r / double(n), WithinAbs(std::strtod(fields[6].c_str(), nullptr), 1e-12));
        CHECK_THAT(f / double(n), WithinAbs(std::strtod(fields[7].c_str(), nullptr), 1e-12));
        ++aggregate_rows;
    }
    CHECK(aggregate_rows > 0);

    // accuracy tables exist for the non-summary types present on dev
    for (const auto& [qtype, _] : report.partition_type_counts) {
        if (qtype == "summary") continue;
        CHECK(fs::exists(out / ("accuracy_" + qtype + ".csv")));
    }
}

TEST_CASE("emit_report twice is byte-identical") {
    const fs::path data = write_dataset();
    const fs::path out_a = fs::temp_directory_path() / "bioqa_rep_a";
    const fs::path out_b = fs::temp_directory_path() / "bioqa_rep_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    RunConfig cfg = base_config(data, out_a);
    const ExperimentReport first = run_experiment(cfg);
    const auto files_a = emit_report(first, out_a);
    const ExperimentReport second = run_experiment(cfg);
    const auto files_b = emit_report(second, out_b);
    REQUIRE(files_a.size() == files_b.size());
    for (std::size_t i = 0; i < files_a.size(); ++i) {
        CHECK(files_a[i].filename() == files_b[i].filename());
        CHECK(slurp(files_a[i]) == slurp(files_b[i]));
    }
}

TEST_CASE("emit_report rejects unwritable directories") {
    const fs::path data = write_dataset();
    RunConfig cfg = base_config(data, "/proc/bioqa_cannot_write/out");
    const ExperimentReport report = run_experiment(cfg);
    CHECK_THROWS_AS(emit_report(report, cfg.out_dir), std::runtime_error);
}

TEST_CASE("run_experiment validates and surfaces errors") {
    RunConfig cfg = base_config("/nonexistent.json", "out");
    CHECK_THROWS_AS(run_experiment(cfg), std::runtime_error);
    cfg.features.clear();
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("significance files cover the configured pairs") {
    const fs::path data = write_dataset();
    const fs::path out = fs::temp_directory_path() / "bioqa_sig";
    fs::remove_all(out);
    const RunConfig cfg = base_config(data, out);
    const auto files = emit_report(run_experiment(cfg), out);
    // 2 features x 2 selectors: selector pair per feature (2) + feature pair
    // per selector (2) = 4 comparisons, each as .csv + .txt
    std::size_t sig = 0;
    for (const auto& f : files) {
        if (f.filename().string().starts_with("significance_")) ++sig;
    }
    CHECK(sig == 8);
}
