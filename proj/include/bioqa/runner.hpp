#pragma once

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bioqa/corpus.hpp"
#include "bioqa/features.hpp"
#include "bioqa/metrics.hpp"
#include "bioqa/selection.hpp"
#include "bioqa/stats.hpp"
#include "bioqa/tiler.hpp"

namespace bioqa {

inline std::string selector_id(const SelectionConfig& cfg) {
    if (cfg.method == SelectorMethod::greedy) return "greedy";
    return "mmr-l" + detail::format_weight(cfg.lambda);
}

/// Parses "greedy", "mmr" (lambda 0.5) or "mmr-l<lambda>".
inline SelectionConfig selector_parse(std::string_view id) {
    SelectionConfig cfg;
    if (id == "greedy") {
        cfg.method = SelectorMethod::greedy;
        return cfg;
    }
    cfg.method = SelectorMethod::mmr;
    if (id == "mmr") return cfg;
    if (id.starts_with("mmr-l")) {
        try {
            cfg.lambda = std::stod(std::string(id.substr(5)));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad selector id \"" + std::string(id) + "\"");
        }
        if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0))
            throw std::invalid_argument("selector lambda outside [0,1] in \"" + std::string(id) + "\"");
        return cfg;
    }
    throw std::invalid_argument("unknown selector \"" + std::string(id) + "\"");
}

enum class Partition { dev, test };

inline std::string_view to_string(Partition p) { return p == Partition::dev ? "dev" : "test"; }

inline Partition partition_from(std::string_view s) {
    if (s == "dev") return Partition::dev;
    if (s == "test") return Partition::test;
    throw std::invalid_argument("partition must be dev or test, got \"" + std::string(s) + "\"");
}

/// Full experiment description: dataset, split seed, evaluation partition,
/// and the (feature x selector x k) sweep.
struct RunConfig {
    std::filesystem::path data;
    std::uint64_t seed = 1;
    Partition partition = Partition::dev;
    std::vector<FeatureKind> features;
    std::vector<SelectionConfig> selectors;
    std::vector<std::size_t> k_values;
    std::optional<std::size_t> word_budget;
    std::optional<std::filesystem::path> stopwords;
    std::filesystem::path out_dir;
    unsigned threads = 1;

    void validate() const {
        if (data.empty()) throw std::invalid_argument("run config: no dataset path");
        if (features.empty()) throw std::invalid_argument("run config: empty feature set");
        if (selectors.empty()) throw std::invalid_argument("run config: empty selector set");
        if (k_values.empty()) throw std::invalid_argument("run config: empty k range");
        for (std::size_t k : k_values) {
            if (k < 1 || k > 50) throw std::invalid_argument("run config: k must lie in [1, 50]");
        }
        if (word_budget && *word_budget == 0)
            throw std::invalid_argument("run config: word budget must be positive");
        if (out_dir.empty()) throw std::invalid_argument("run config: no output directory");
        if (threads == 0) throw std::invalid_argument("run config: threads must be positive");
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["data"] = data.string();
        j["seed"] = seed;
        j["partition"] = std::string(to_string(partition));
        auto feats = nlohmann::json::array();
        for (const FeatureKind& f : features) feats.push_back(f.id());
        j["features"] = std::move(feats);
        auto sels = nlohmann::json::array();
        for (const SelectionConfig& s : selectors) sels.push_back(selector_id(s));
        j["selectors"] = std::move(sels);
        j["k"] = k_values;
        j["word_budget"] = word_budget ? nlohmann::json(*word_budget) : nlohmann::json(nullptr);
        j["stopwords"] = stopwords ? nlohmann::json(stopwords->string()) : nlohmann::json(nullptr);
        j["out"] = out_dir.string();
        j["threads"] = threads;
        return j;
    }

    static RunConfig from_json(const nlohmann::json& j) {
        RunConfig cfg;
        cfg.data = j.at("data").get<std::string>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.partition = partition_from(j.at("partition").get<std::string>());
        for (const auto& f : j.at("features")) cfg.features.push_back(FeatureKind::parse(f.get<std::string>()));
        for (const auto& s : j.at("selectors")) cfg.selectors.push_back(selector_parse(s.get<std::string>()));
        cfg.k_values = j.at("k").get<std::vector<std::size_t>>();
        if (!j.at("word_budget").is_null()) cfg.word_budget = j.at("word_budget").get<std::size_t>();
        if (!j.at("stopwords").is_null())
            cfg.stopwords = std::filesystem::path(j.at("stopwords").get<std::string>());
        cfg.out_dir = j.at("out").get<std::string>();
        cfg.threads = j.at("threads").get<unsigned>();
        return cfg;
    }
};

inline bool operator==(const RunConfig& a, const RunConfig& b) {
    auto key = [](const RunConfig& c) {
        std::vector<std::string> sels;
        for (const auto& s : c.selectors) sels.push_back(selector_id(s));
        std::vector<std::string> feats;
        for (const auto& f : c.features) feats.push_back(f.id());
        return std::tuple(c.data.string(), c.seed, c.partition, feats, sels, c.k_values, c.word_budget,
                          c.stopwords ? c.stopwords->string() : std::string(), c.out_dir.string(), c.threads);
    };
    return key(a) == key(b);
}

/// Everything run_experiment produces: the per-question score rows plus the
/// split manifest and bookkeeping. All emitted aggregates are recomputed
/// from `rows`.
struct ExperimentReport {
    RunConfig config;
    nlohmann::json split;  // id manifest, see split_manifest()
    std::map<std::string, std::size_t> partition_type_counts;
    std::vector<QuestionScore> rows;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
};

namespace detail {

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

inline std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

// Splits one CSV record; handles quoted fields with doubled quotes.
inline std::vector<std::string> csv_split(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                current.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

inline std::string sanitize_filename(std::string_view s) {
    std::string out;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '.' || c == '-' || c == '_';
        out.push_back(ok ? c : '-');
    }
    return out;
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: byte-stable across platforms
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace detail

/// Runs the full sweep described by `cfg`: per partition question and per
/// (feature, selector, k), score the candidate pool, select, tile, and score
/// the answer. Questions whose snippets yield no candidates are skipped and
/// counted. Deterministic for a fixed (dataset, config), whatever the number
/// of worker threads.
inline ExperimentReport run_experiment(const RunConfig& cfg) {
    cfg.validate();
    ExperimentReport report;
    report.config = cfg;

    const std::vector<Question> questions = load_dataset(cfg.data, &report.warnings);
    const DatasetSplit split = split_dataset(questions, cfg.seed);
    report.split = split_manifest(split);

    std::optional<StopwordSet> stopwords;
    if (cfg.stopwords) stopwords = load_stopwords(*cfg.stopwords);
    const StopwordSet* stop = stopwords ? &*stopwords : nullptr;

    const bool needs_idf =
        std::any_of(cfg.features.begin(), cfg.features.end(), [](const FeatureKind& f) { return f.needs_idf(); });
    IdfTable idf;
    if (needs_idf) {
        for (const Question& q : split.train) {
            for (std::size_t i = 0; i < q.snippets.size(); ++i) {
                for (const Sentence& s : split_sentences(q.snippets[i], i)) {
                    const auto tokens = detail::filter_stopwords(s.tokens, stop);
                    idf.add_document(tokens);
                }
            }
        }
    }

    const std::vector<Question>& eval = cfg.partition == Partition::dev ? split.dev : split.test;
    if (eval.empty()) throw std::runtime_error("empty evaluation partition");
    for (const Question& q : eval) ++report.partition_type_counts[std::string(to_string(q.qtype))];

    const HeuristicParseProvider parser;
    const std::size_t k_max = *std::max_element(cfg.k_values.begin(), cfg.k_values.end());

    std::vector<std::vector<QuestionScore>> slots(eval.size());
    std::vector<unsigned char> skipped_flags(eval.size(), 0);  // not vector<bool>: parallel writes
    std::mutex warn_mutex;

    auto evaluate_question = [&](std::size_t qi) {
        const Question& q = eval[qi];
        std::vector<Sentence> pool;
        for (std::size_t i = 0; i < q.snippets.size(); ++i) {
            for (Sentence& s : split_sentences(q.snippets[i], i)) pool.push_back(std::move(s));
        }
        // candidate_pool dedup semantics, tolerant of empty pools
        std::unordered_set<std::string> seen;
        std::vector<Sentence> deduped;
        for (Sentence& s : pool) {
            if (seen.insert(s.raw).second) deduped.push_back(std::move(s));
        }
        if (deduped.empty()) {
            skipped_flags[qi] = 1;
            std::lock_guard lock(warn_mutex);
            report.warnings.push_back("skipping question " + q.id + ": empty candidate pool");
            return;
        }
        for (const FeatureKind& feature : cfg.features) {
            const auto scored =
                score_pool(q, deduped, feature, feature.needs_idf() ? &idf : nullptr, &parser, stop);
            for (const SelectionConfig& selector : cfg.selectors) {
                SelectionConfig sel_cfg = selector;
                sel_cfg.k = k_max;
                const Selection full =
                    select(scored, deduped, sel_cfg, feature.needs_idf() ? &idf : nullptr, &parser, stop);
                for (const std::size_t k : cfg.k_values) {
                    Selection prefix;
                    const std::size_t take = std::min(k, full.chosen.size());
                    prefix.chosen.assign(full.chosen.begin(), full.chosen.begin() + take);
                    prefix.trace.assign(full.trace.begin(), full.trace.begin() + take);
                    const AnswerText answer = tile(prefix, deduped, cfg.word_budget);
                    QuestionScore row;
                    row.qid = q.id;
                    row.qtype = q.qtype;
                    row.feature = feature.id();
                    row.selector = selector_id(selector);
                    row.k = k;
                    row.rouge = rouge_l_best(q.ideal_answers, answer.text);
                    if (q.qtype != QuestionType::summary) {
                        const MatchResult match = exact_match(answer.text, q.exact);
                        row.soft_hit = match.soft_hit;
                        row.hard_hit = match.hard_hit;
                    }
                    slots[qi].push_back(std::move(row));
                }
            }
        }
    };

    const unsigned workers = std::min<unsigned>(cfg.threads, static_cast<unsigned>(eval.size()));
    if (workers <= 1) {
        for (std::size_t qi = 0; qi < eval.size(); ++qi) evaluate_question(qi);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool_threads;
        for (unsigned w = 0; w < workers; ++w) {
            pool_threads.emplace_back([&] {
                for (std::size_t qi = next.fetch_add(1); qi < eval.size(); qi = next.fetch_add(1))
                    evaluate_question(qi);
            });
        }
        for (std::thread& t : pool_threads) t.join();
    }

    for (std::size_t qi = 0; qi < eval.size(); ++qi) {
        if (skipped_flags[qi]) ++report.skipped;
        for (QuestionScore& row : slots[qi]) report.rows.push_back(std::move(row));
    }
    // Order-stable merge regardless of worker count.
    std::stable_sort(report.rows.begin(), report.rows.end(), [](const QuestionScore& a, const QuestionScore& b) {
        return std::tie(a.qid, a.feature, a.selector, a.k) < std::tie(b.qid, b.feature, b.selector, b.k);
    });
    std::sort(report.warnings.begin(), report.warnings.end());
    return report;
}

namespace detail {

struct RougeAggregate {
    std::size_t n = 0;
    double p = 0.0, r = 0.0, f = 0.0;
};

}  // namespace detail

/// Writes the report files into `dir` and returns the paths written:
/// per_question.csv, rouge_by_k.csv, accuracy_<qtype>.csv per non-summary
/// type present, significance tables (CSV + aligned text) for every
/// baseline-vs-challenger pair implied by the sweep, split.json and
/// run.json. Significance compares summary-type rows when the run has them,
/// otherwise all rows.
inline std::vector<std::filesystem::path> emit_report(const ExperimentReport& report,
                                                      const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    std::vector<fs::path> written;

    {
        auto out = detail::open_for_write(dir / "per_question.csv");
        out << "qid,type,feature,selector,k,rouge_p,rouge_r,rouge_f1,soft,hard\n";
        for (const QuestionScore& row : report.rows) {
            out << detail::csv_escape(row.qid) << ',' << to_string(row.qtype) << ','
                << detail::csv_escape(row.feature) << ',' << detail::csv_escape(row.selector) << ',' << row.k
                << ',' << detail::format_double(row.rouge.precision) << ','
                << detail::format_double(row.rouge.recall) << ',' << detail::format_double(row.rouge.f1) << ','
                << (row.soft_hit ? (*row.soft_hit ? "1" : "0") : "") << ','
                << (row.hard_hit ? (*row.hard_hit ? "1" : "0") : "") << '\n';
        }
        written.push_back(dir / "per_question.csv");
    }

    {
        std::map<std::tuple<std::string, std::string, std::string, std::size_t>, detail::RougeAggregate> groups;
        for (const QuestionScore& row : report.rows) {
            auto& g = groups[{std::string(to_string(row.qtype)), row.feature, row.selector, row.k}];
            ++g.n;
            g.p += row.rouge.precision;
            g.r += row.rouge.recall;
            g.f += row.rouge.f1;
        }
        auto out = detail::open_for_write(dir / "rouge_by_k.csv");
        out << "qtype,feature,selector,k,n,rouge_p,rouge_r,rouge_f1\n";
        for (const auto& [key, g] : groups) {
            const auto& [qtype, feature, selector, k] = key;
            const double n = static_cast<double>(g.n);
            out << qtype << ',' << detail::csv_escape(feature) << ',' << detail::csv_escape(selector) << ','
                << k << ',' << g.n << ',' << detail::format_double(g.p / n) << ','
                << detail::format_double(g.r / n) << ',' << detail::format_double(g.f / n) << '\n';
        }
        written.push_back(dir / "rouge_by_k.csv");
    }

    for (const QuestionType qtype : {QuestionType::yesno, QuestionType::factoid, QuestionType::list}) {
        std::map<std::tuple<std::string, std::string, std::size_t>, std::vector<QuestionScore>> groups;
        for (const QuestionScore& row : report.rows) {
            if (row.qtype == qtype) groups[{row.feature, row.selector, row.k}].push_back(row);
        }
        if (groups.empty()) continue;
        const fs::path path = dir / ("accuracy_" + std::string(to_string(qtype)) + ".csv");
        auto out = detail::open_for_write(path);
        out << "feature,selector,k,n,soft,hard\n";
        for (const auto& [key, rows] : groups) {
            const auto& [feature, selector, k] = key;
            const AccuracyPair acc = aggregate_accuracy(rows);
            out << detail::csv_escape(feature) << ',' << detail::csv_escape(selector) << ',' << k << ','
                << acc.n_questions << ',' << detail::format_double(acc.soft) << ','
                << detail::format_double(acc.hard) << '\n';
        }
        written.push_back(path);
    }

    {
        // The paper's comparisons: selector pairs under each feature, then
        // feature pairs under each selector, baselines first-listed.
        std::vector<std::pair<ConfigId, ConfigId>> pairs;
        const RunConfig& cfg = report.config;
        for (const FeatureKind& f : cfg.features) {
            for (std::size_t si = 1; si < cfg.selectors.size(); ++si) {
                pairs.push_back({ConfigId{f.id(), selector_id(cfg.selectors[0])},
                                 ConfigId{f.id(), selector_id(cfg.selectors[si])}});
            }
        }
        for (const SelectionConfig& s : cfg.selectors) {
            for (std::size_t fi = 1; fi < cfg.features.size(); ++fi) {
                pairs.push_back({ConfigId{cfg.features[0].id(), selector_id(s)},
                                 ConfigId{cfg.features[fi].id(), selector_id(s)}});
            }
        }
        const bool has_summary = std::any_of(report.rows.begin(), report.rows.end(),
                                             [](const QuestionScore& r) { return r.qtype == QuestionType::summary; });
        std::vector<QuestionScore> basis;
        for (const QuestionScore& row : report.rows) {
            if (!has_summary || row.qtype == QuestionType::summary) basis.push_back(row);
        }
        SignificanceOptions options;
        options.degenerate_p_one = true;
        for (const auto& [baseline, challenger] : pairs) {
            const auto table =
                significance_table(basis, baseline, challenger, report.config.k_values, options);
            const std::string stem = "significance_" + detail::sanitize_filename(baseline.str()) + "_vs_" +
                                     detail::sanitize_filename(challenger.str());
            {
                auto out = detail::open_for_write(dir / (stem + ".csv"));
                out << "k,base_mean,challenger_mean,mean_diff,p\n";
                for (const ComparisonRow& row : table) {
                    out << row.k << ',' << detail::format_double(row.base_mean) << ','
                        << detail::format_double(row.challenger_mean) << ','
                        << detail::format_double(row.mean_diff) << ',' << detail::format_double(row.p_value)
                        << '\n';
                }
                written.push_back(dir / (stem + ".csv"));
            }
            {
                auto out = detail::open_for_write(dir / (stem + ".txt"));
                char line[160];
                std::snprintf(line, sizeof(line), "%-4s %-12s %-12s %-12s %-12s\n", "k",
                              baseline.str().size() <= 12 ? baseline.str().c_str() : "base",
                              challenger.str().size() <= 12 ? challenger.str().c_str() : "challenger",
                              "mean-diff", "p");
                out << line;
                for (const ComparisonRow& row : table) {
                    std::snprintf(line, sizeof(line), "%-4zu %-12.4f %-12.4f %-12.4f %-12.4f\n", row.k,
                                  row.base_mean, row.challenger_mean, row.mean_diff, row.p_value);
                    out << line;
                }
                written.push_back(dir / (stem + ".txt"));
            }
        }
    }

    {
        auto out = detail::open_for_write(dir / "split.json");
        out << report.split.dump(2) << '\n';
        written.push_back(dir / "split.json");
    }
    {
        nlohmann::json run;
        run["config"] = report.config.to_json();
        run["result"] = {{"rows", report.rows.size()},
                         {"skipped", report.skipped},
                         {"partition_type_counts", report.partition_type_counts},
                         {"warnings", report.warnings}};
        auto out = detail::open_for_write(dir / "run.json");
        out << run.dump(2) << '\n';
        written.push_back(dir / "run.json");
    }
    return written;
}

/// Reads rows back from a per_question.csv produced by emit_report.
inline std::vector<QuestionScore> read_question_scores(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<QuestionScore> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        const auto fields = detail::csv_split(line);
        if (fields.size() != 10) throw std::runtime_error(path.string() + ": bad row: " + line);
        QuestionScore row;
        row.qid = fields[0];
        const auto qtype = question_type_from(fields[1]);
        if (!qtype) throw std::runtime_error(path.string() + ": bad question type: " + fields[1]);
        row.qtype = *qtype;
        row.feature = fields[2];
        row.selector = fields[3];
        row.k = static_cast<std::size_t>(std::stoull(fields[4]));
        row.rouge.precision = std::strtod(fields[5].c_str(), nullptr);
        row.rouge.recall = std::strtod(fields[6].c_str(), nullptr);
        row.rouge.f1 = std::strtod(fields[7].c_str(), nullptr);
        if (!fields[8].empty()) row.soft_hit = fields[8] == "1";
        if (!fields[9].empty()) row.hard_hit = fields[9] == "1";
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace bioqa
