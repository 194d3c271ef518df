// Command-line front end: `run` sweeps a (feature x selector x k) grid over a
// BioASQ-format dataset and writes the report files; `compare` builds
// post-hoc significance tables from a per_question.csv.

#include <cstdio>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bioqa/bioqa.hpp"

namespace {

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t comma = csv.find(',', start);
        const std::string item = csv.substr(start, comma == std::string::npos ? comma : comma - start);
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

// Accepts "5", "1..10", or a comma list of either.
std::vector<std::size_t> parse_k_values(const std::string& spec) {
    std::set<std::size_t> values;
    for (const std::string& part : split_list(spec)) {
        const std::size_t dots = part.find("..");
        try {
            if (dots == std::string::npos) {
                values.insert(std::stoull(part));
            } else {
                const std::size_t lo = std::stoull(part.substr(0, dots));
                const std::size_t hi = std::stoull(part.substr(dots + 2));
                if (hi < lo) throw std::invalid_argument("empty range");
                for (std::size_t k = lo; k <= hi; ++k) values.insert(k);
            }
        } catch (const std::exception&) {
            throw std::invalid_argument("bad k spec \"" + spec + "\": expected <int>, <a..b> or a comma list");
        }
    }
    if (values.empty()) throw std::invalid_argument("empty k spec");
    return {values.begin(), values.end()};
}

void print_comparison(const bioqa::ConfigId& baseline, const bioqa::ConfigId& challenger,
                      const std::vector<bioqa::ComparisonRow>& table) {
    std::printf("%-4s %-14s %-14s %-12s %-10s %-6s\n", "k", "base", "challenger", "mean-diff", "p", "n");
    for (const auto& row : table) {
        std::printf("%-4zu %-14.4f %-14.4f %-12.4f %-10.4f %-6zu\n", row.k, row.base_mean,
                    row.challenger_mean, row.mean_diff, row.p_value, row.n);
    }
    std::printf("(baseline %s, challenger %s)\n", baseline.str().c_str(), challenger.str().c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extractive biomedical QA pipeline: candidate scoring, diversity-aware "
                 "selection, answer tiling, and evaluation"};
    app.require_subcommand(1);

    // --- run ---
    auto* run = app.add_subcommand("run", "Run an experiment sweep and write report files");
    std::string data;
    std::uint64_t seed = 1;
    std::string partition = "dev";
    std::string features = "jaccard";
    std::string selectors = "greedy";
    double lambda = 0.5;
    std::string k_spec = "1..10";
    std::optional<std::size_t> word_budget;
    std::string stopwords;
    std::string out_dir;
    unsigned threads = 1;
    run->set_config("--config", "", "Flat key=value config file; command-line flags win");
    run->add_option("--data", data, "BioASQ-format training JSON")->required();
    run->add_option("--seed", seed, "Split shuffle seed");
    run->add_option("--partition", partition, "Partition to evaluate: dev|test")
        ->check(CLI::IsMember({"dev", "test"}));
    run->add_option("--features", features,
                    "Comma list of jaccard|dice|dice-bigram|tf|tfidf|combined|root:<base>:<w>");
    run->add_option("--selector", selectors, "Comma list of greedy|mmr|mmr-l<lambda>");
    run->add_option("--lambda", lambda, "MMR lambda for selectors given as plain \"mmr\"");
    run->add_option("--k", k_spec, "k sweep: <int>, <a..b>, or comma list");
    run->add_option("--word-budget", word_budget, "Tiler word budget (whole sentences)");
    run->add_option("--stopwords", stopwords, "Stopword file, one word per line");
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--threads", threads, "Worker threads over questions");

    // --- compare ---
    auto* compare = app.add_subcommand("compare", "Significance table from a per_question.csv");
    std::string rows_path;
    std::string baseline_id;
    std::string challenger_id;
    std::string compare_k;
    std::string metric = "recall";
    std::string qtype_filter;
    std::string csv_out;
    compare->add_option("--rows", rows_path, "per_question.csv from a run")->required();
    compare->add_option("--baseline", baseline_id, "Baseline config id <feature>/<selector>")->required();
    compare->add_option("--challenger", challenger_id, "Challenger config id <feature>/<selector>")
        ->required();
    compare->add_option("--k", compare_k, "k values (default: all in the file)");
    compare->add_option("--metric", metric, "ROUGE field to compare")
        ->check(CLI::IsMember({"precision", "recall", "f1"}));
    compare->add_option("--type", qtype_filter, "Restrict to one question type")
        ->check(CLI::IsMember({"summary", "yesno", "factoid", "list"}));
    compare->add_option("--csv", csv_out, "Also write the table as CSV to this path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            bioqa::RunConfig cfg;
            cfg.data = data;
            cfg.seed = seed;
            cfg.partition = bioqa::partition_from(partition);
            for (const std::string& id : split_list(features))
                cfg.features.push_back(bioqa::FeatureKind::parse(id));
            for (const std::string& id : split_list(selectors)) {
                bioqa::SelectionConfig sel = bioqa::selector_parse(id);
                if (sel.method == bioqa::SelectorMethod::mmr && id == "mmr") sel.lambda = lambda;
                cfg.selectors.push_back(sel);
            }
            cfg.k_values = parse_k_values(k_spec);
            cfg.word_budget = word_budget;
            if (!stopwords.empty()) cfg.stopwords = stopwords;
            cfg.out_dir = out_dir;
            cfg.threads = threads;

            const bioqa::ExperimentReport report = bioqa::run_experiment(cfg);
            for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
            const auto files = bioqa::emit_report(report, cfg.out_dir);
            std::cerr << report.rows.size() << " rows (" << report.skipped << " questions skipped)\n";
            for (const auto& f : files) std::cout << f.string() << "\n";
            return 0;
        }

        // compare
        const auto all_rows = bioqa::read_question_scores(rows_path);
        std::vector<bioqa::QuestionScore> rows;
        if (!qtype_filter.empty()) {
            const auto want = bioqa::question_type_from(qtype_filter);
            for (const auto& r : all_rows) {
                if (r.qtype == *want) rows.push_back(r);
            }
        } else {
            const bool has_summary = std::any_of(all_rows.begin(), all_rows.end(), [](const auto& r) {
                return r.qtype == bioqa::QuestionType::summary;
            });
            for (const auto& r : all_rows) {
                if (!has_summary || r.qtype == bioqa::QuestionType::summary) rows.push_back(r);
            }
        }
        if (rows.empty()) throw std::runtime_error("no rows to compare after filtering");

        std::vector<std::size_t> k_values;
        if (compare_k.empty()) {
            std::set<std::size_t> ks;
            for (const auto& r : rows) ks.insert(r.k);
            k_values.assign(ks.begin(), ks.end());
        } else {
            k_values = parse_k_values(compare_k);
        }

        bioqa::SignificanceOptions options;
        options.degenerate_p_one = true;
        options.metric = metric == "precision" ? bioqa::ScoreField::precision
                         : metric == "f1"      ? bioqa::ScoreField::f1
                                               : bioqa::ScoreField::recall;
        const auto baseline = bioqa::ConfigId::parse(baseline_id);
        const auto challenger = bioqa::ConfigId::parse(challenger_id);
        const auto table = bioqa::significance_table(rows, baseline, challenger, k_values, options);
        print_comparison(baseline, challenger, table);
        if (!csv_out.empty()) {
            std::ofstream out(csv_out, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + csv_out);
            out << "k,base_mean,challenger_mean,mean_diff,p\n";
            for (const auto& row : table) {
                out << row.k << ',' << row.base_mean << ',' << row.challenger_mean << ',' << row.mean_diff
                    << ',' << row.p_value << '\n';
            }
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
