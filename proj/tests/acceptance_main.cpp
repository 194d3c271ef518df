// Acceptance suite. Each criterion prints exactly one PASS/FAIL line (SKIP
// for the real-data trend check when no dataset is available) and the binary
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bioqa/bioqa.hpp"

namespace fs = std::filesystem;
using namespace bioqa;

namespace {

struct Outcome {
    bool ok = true;
    bool skipped = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<Token> random_tokens(std::mt19937& rng, std::size_t max_len, std::size_t vocab) {
    std::vector<Token> out;
    const std::size_t len = rng() % (max_len + 1);
    for (std::size_t i = 0; i < len; ++i) out.push_back(Token{"w" + std::to_string(rng() % vocab)});
    return out;
}

// ---- criterion 1: ROUGE-L vs an independent LCS oracle ----

std::size_t lcs_recursive(const std::vector<Token>& x, const std::vector<Token>& y,
                          std::vector<std::vector<int>>& memo, std::size_t i, std::size_t j) {
    if (i == x.size() || j == y.size()) return 0;
    int& m = memo[i][j];
    if (m >= 0) return static_cast<std::size_t>(m);
    std::size_t best;
    if (x[i] == y[j]) {
        best = 1 + lcs_recursive(x, y, memo, i + 1, j + 1);
    } else {
        best = std::max(lcs_recursive(x, y, memo, i + 1, j), lcs_recursive(x, y, memo, i, j + 1));
    }
    m = static_cast<int>(best);
    return best;
}

Outcome criterion_rouge_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(1001);
    Outcome out;
    for (int iter = 0; iter < 200; ++iter) {
        const auto ref_tokens = random_tokens(rng, 30, 8);
        const auto pred_tokens = random_tokens(rng, 30, 8);
        const std::string ref = join_tokens(ref_tokens);
        const std::string pred = join_tokens(pred_tokens);

        std::vector<std::vector<int>> memo(ref_tokens.size() + 1,
                                           std::vector<int>(pred_tokens.size() + 1, -1));
        const std::size_t lcs = lcs_recursive(ref_tokens, pred_tokens, memo, 0, 0);
        if (lcs_length(ref_tokens, pred_tokens) != lcs) {
            out.ok = false;
            out.detail = "integer LCS mismatch at iteration " + std::to_string(iter);
            return out;
        }
        const double expect_r = ref_tokens.empty() ? 0.0 : double(lcs) / double(ref_tokens.size());
        const double expect_p = pred_tokens.empty() ? 0.0 : double(lcs) / double(pred_tokens.size());
        const double expect_f =
            (expect_p + expect_r) > 0.0 ? 2.0 * expect_p * expect_r / (expect_p + expect_r) : 0.0;
        const RougeL got = rouge_l(ref, pred);
        if (std::abs(got.recall - expect_r) > 1e-12 || std::abs(got.precision - expect_p) > 1e-12 ||
            std::abs(got.f1 - expect_f) > 1e-12) {
            out.ok = false;
            out.detail = "P/R/F mismatch at iteration " + std::to_string(iter);
            return out;
        }
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 5.0) {
        out.ok = false;
        out.detail = "runtime " + std::to_string(elapsed) + "s exceeds 5s";
        return out;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "200 pairs, %.2fs", elapsed);
    out.detail = buf;
    return out;
}

// ---- criterion 2: Wilcoxon exact enumeration oracle ----

double wilcoxon_enumerated(const std::vector<double>& diffs) {
    std::vector<double> d;
    for (double v : diffs) {
        if (v != 0.0) d.push_back(v);
    }
    const std::size_t n = d.size();
    std::vector<double> abs_d(n);
    for (std::size_t i = 0; i < n; ++i) abs_d[i] = std::abs(d[i]);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return abs_d[a] < abs_d[b]; });
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && abs_d[order[j + 1]] == abs_d[order[i]]) ++j;
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = (double(i + 1) + double(j + 1)) / 2.0;
        i = j + 1;
    }
    double w_pos = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total += rank[i];
        if (d[i] > 0) w_pos += rank[i];
    }
    const double w_obs = std::min(w_pos, total - w_pos);
    std::size_t extreme = 0;
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::size_t(1) << i)) s += rank[i];
        }
        if (std::min(s, total - s) <= w_obs) ++extreme;
    }
    return double(extreme) / double(std::size_t(1) << n);
}

Outcome criterion_wilcoxon_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(2002);
    Outcome out;
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t n = 2 + rng() % 11;  // up to 12
        std::vector<double> diffs(n);
        bool all_zero = true;
        for (double& v : diffs) {
            v = (double(rng() % 11) - 5.0) / 5.0;
            all_zero = all_zero && v == 0.0;
        }
        if (all_zero) diffs[0] = 0.4;
        PairedSample sample;
        for (double v : diffs) {
            sample.a.push_back(0.25);
            sample.b.push_back(0.25 + v);
        }
        const WilcoxonResult got = wilcoxon_signed_rank(sample, WilcoxonMethod::exact);
        const double expect = wilcoxon_enumerated(diffs);
        if (std::abs(got.p_value - expect) > 1e-12) {
            out.ok = false;
            out.detail = "exact p mismatch at iteration " + std::to_string(iter);
            return out;
        }
    }
    for (int iter = 0; iter < 40; ++iter) {
        const std::size_t n = 15 + rng() % 6;  // 15..20
        PairedSample sample;
        for (std::size_t i = 0; i < n; ++i) {
            double v;
            do {
                v = (double(rng() % 41) - 18.0) / 20.0;
            } while (v == 0.0);
            sample.a.push_back(0.5);
            sample.b.push_back(0.5 + v);
        }
        const double exact = wilcoxon_signed_rank(sample, WilcoxonMethod::exact).p_value;
        const double approx = wilcoxon_signed_rank(sample, WilcoxonMethod::normal_approx).p_value;
        if (std::abs(exact - approx) > 0.02) {
            out.ok = false;
            char buf[128];
            std::snprintf(buf, sizeof(buf), "exact %.4f vs normal %.4f at n=%zu", exact, approx, n);
            out.detail = buf;
            return out;
        }
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 30.0) {
        out.ok = false;
        out.detail = "runtime " + std::to_string(elapsed) + "s exceeds 30s";
        return out;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "100 exact + 40 approximation samples, %.2fs", elapsed);
    out.detail = buf;
    return out;
}

// ---- criterion 3: selection algebra ----

Outcome criterion_selection_algebra() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(3003);
    Outcome out;
    for (int iter = 0; iter < 500; ++iter) {
        const std::size_t n = 1 + rng() % 20;
        std::vector<ScoredCandidate> scored(n);
        std::vector<double> rel(n);
        for (std::size_t i = 0; i < n; ++i) {
            rel[i] = double(rng() % 1000) / 999.0;
            scored[i].score = rel[i];
        }
        std::vector<std::vector<double>> sim(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) sim[i][j] = sim[j][i] = double(rng() % 1000) / 999.0;
        }
        const auto pair_sim = [&](std::size_t a, std::size_t b) { return sim[a][b]; };
        const std::size_t k = 1 + rng() % (n + 3);

        const Selection greedy = greedy_select(scored, k);
        const Selection unit_lambda = mmr_select(scored, k, 1.0, pair_sim);
        if (greedy.chosen != unit_lambda.chosen) {
            out.ok = false;
            out.detail = "lambda=1 differs from greedy at iteration " + std::to_string(iter);
            return out;
        }
        for (std::size_t s = 0; s < greedy.trace.size(); ++s) {
            if (greedy.trace[s].marginal != unit_lambda.trace[s].marginal) {
                out.ok = false;
                out.detail = "lambda=1 trace differs at iteration " + std::to_string(iter);
                return out;
            }
        }

        for (const double lambda : {0.0, 0.3, 0.5, 0.7}) {
            const Selection got = mmr_select(scored, k, lambda, pair_sim);
            // replay the recurrence step by step
            std::vector<bool> used(n, false);
            for (std::size_t step = 0; step < got.chosen.size(); ++step) {
                double best_value = -1e300;
                std::size_t best = n;
                for (std::size_t i = 0; i < n; ++i) {
                    if (used[i]) continue;
                    double value = rel[i];
                    if (step > 0) {
                        double redundancy = -1e300;
                        for (std::size_t s = 0; s < step; ++s)
                            redundancy = std::max(redundancy, sim[i][got.chosen[s]]);
                        value = lambda * rel[i] - (1.0 - lambda) * redundancy;
                    }
                    if (value > best_value) {
                        best_value = value;
                        best = i;
                    }
                }
                if (best != got.chosen[step] || std::abs(best_value - got.trace[step].marginal) > 1e-12) {
                    out.ok = false;
                    out.detail = "MMR trace replay mismatch at iteration " + std::to_string(iter);
                    return out;
                }
                used[best] = true;
            }
        }
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 10.0) {
        out.ok = false;
        out.detail = "runtime " + std::to_string(elapsed) + "s exceeds 10s";
        return out;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "500 pools, %.2fs", elapsed);
    out.detail = buf;
    return out;
}

// ---- criterion 4: similarity identities ----

Outcome criterion_similarity_identities() {
    std::mt19937 rng(4004);
    Outcome out;
    IdfTable uniform;
    uniform.doc_count = 20;
    for (int v = 0; v < 9; ++v) uniform.df["w" + std::to_string(v)] = 7;
    for (int iter = 0; iter < 1000; ++iter) {
        const auto a = random_tokens(rng, 10, 9);
        const auto b = random_tokens(rng, 10, 9);
        const double j = jaccard(a, b);
        const double d = dice(a, b);
        const double tf = tf_cosine(a, b);
        const double tfidf = tfidf_cosine(a, b, uniform);
        const double bigram = dice_bigram(a, b);

        const bool empty_pair = a.empty() && b.empty();
        const double dice_from_jaccard = empty_pair ? 0.0 : 2.0 * j / (1.0 + j);
        if (std::abs(d - dice_from_jaccard) > 1e-12) {
            out.ok = false;
            out.detail = "dice/jaccard identity failed";
            return out;
        }
        if (std::abs(tfidf - tf) > 1e-12) {
            out.ok = false;
            out.detail = "uniform-idf tfidf differs from tf cosine";
            return out;
        }
        if (jaccard(a, b) != jaccard(b, a) || dice(a, b) != dice(b, a) || tf_cosine(a, b) != tf_cosine(b, a) ||
            tfidf_cosine(a, b, uniform) != tfidf_cosine(b, a, uniform) ||
            dice_bigram(a, b) != dice_bigram(b, a)) {
            out.ok = false;
            out.detail = "symmetry violated";
            return out;
        }
        for (const double v : {j, d, tf, tfidf, bigram}) {
            if (!(v >= 0.0 && v <= 1.0)) {
                out.ok = false;
                out.detail = "score out of [0,1]";
                return out;
            }
        }
        const double combined = j + d + tf;
        if (!(combined >= 0.0 && combined <= 3.0)) {
            out.ok = false;
            out.detail = "combined out of [0,3]";
            return out;
        }
    }
    out.detail = "1000 pairs";
    return out;
}

// ---- criterion 5: metric consistency ----

Outcome criterion_metric_consistency() {
    std::mt19937 rng(5005);
    Outcome out;
    const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta"};
    auto random_text = [&](std::size_t max_words) {
        std::string s;
        const std::size_t len = rng() % (max_words + 1);
        for (std::size_t i = 0; i < len; ++i) s += vocab[rng() % vocab.size()] + " ";
        return s;
    };
    for (int batch = 0; batch < 60; ++batch) {
        const std::size_t groups = 1 + rng() % 4;
        std::vector<QuestionScore> rows;
        for (int qi = 0; qi < 25; ++qi) {
            ExactAnswer exact;
            for (std::size_t g = 0; g < groups; ++g)
                exact.groups.push_back({vocab[rng() % vocab.size()], vocab[rng() % vocab.size()]});
            const MatchResult m = exact_match(random_text(10), exact);
            if (m.hard_hit && !m.soft_hit) {
                out.ok = false;
                out.detail = "hard hit without soft hit";
                return out;
            }
            if (groups == 1 && m.soft_hit != m.hard_hit) {
                out.ok = false;
                out.detail = "single-group soft and hard diverge";
                return out;
            }
            QuestionScore row;
            row.qid = "q" + std::to_string(qi);
            row.qtype = QuestionType::list;
            row.soft_hit = m.soft_hit;
            row.hard_hit = m.hard_hit;
            rows.push_back(row);
        }
        const AccuracyPair acc = aggregate_accuracy(rows);
        if (acc.hard > acc.soft) {
            out.ok = false;
            out.detail = "aggregate hard above soft";
            return out;
        }
        if (groups == 1 && acc.hard != acc.soft) {
            out.ok = false;
            out.detail = "single-group aggregate soft != hard";
            return out;
        }
    }
    out.detail = "60 batches x 25 questions";
    return out;
}

// ---- criterion 6: paper arithmetic spot-checks ----

Outcome criterion_paper_arithmetic() {
    Outcome out;
    const PairedSample k5{{0.573, 0.573}, {0.612, 0.612}};
    if (std::abs(mean_diff(k5) - 0.039) > 1e-12) {
        out.ok = false;
        out.detail = "0.612 - 0.573 mean-diff check failed";
        return out;
    }
    std::vector<Question> questions;
    for (int i = 0; i < 1799; ++i) {
        Question q;
        q.id = "q" + std::to_string(i);
        q.qtype = QuestionType::summary;
        q.body = "b";
        q.ideal_answers = {"a"};
        questions.push_back(q);
    }
    const DatasetSplit split = split_dataset(questions, 99);
    if (split.train.size() != 1259 || split.dev.size() != 359 || split.test.size() != 181) {
        out.ok = false;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "split sizes (%zu, %zu, %zu) != (1259, 359, 181)",
                      split.train.size(), split.dev.size(), split.test.size());
        out.detail = buf;
        return out;
    }
    out.detail = "mean-diff 0.039; split of 1799 = (1259, 359, 181)";
    return out;
}

// ---- criterion 7: qualitative trend reproduction on real data ----

Outcome criterion_real_data_trends() {
    Outcome out;
    std::vector<fs::path> candidates;
    if (const char* env = std::getenv("BIOASQ_6B_JSON")) candidates.push_back(env);
    candidates.push_back("data/BioASQ-training6b.json");
    candidates.push_back("data/training6b.json");
    fs::path data;
    for (const fs::path& c : candidates) {
        if (!c.empty() && fs::exists(c)) {
            data = c;
            break;
        }
    }
    if (data.empty()) {
        out.skipped = true;
        out.detail = "BioASQ 6b training data not available (set BIOASQ_6B_JSON)";
        return out;
    }

    RunConfig cfg;
    cfg.data = data;
    cfg.seed = 1;
    cfg.partition = Partition::dev;
    cfg.features = {FeatureKind::parse("jaccard")};
    cfg.selectors = {selector_parse("greedy"), selector_parse("mmr-l0.5")};
    cfg.k_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    cfg.out_dir = fs::temp_directory_path() / "bioqa_accept_trend";
    cfg.threads = std::max(1u, std::thread::hardware_concurrency());
    const ExperimentReport report = run_experiment(cfg);

    std::map<std::pair<std::string, std::size_t>, std::pair<double, std::size_t>> recall_by;
    std::map<std::size_t, std::pair<double, std::size_t>> f1_by_k;
    for (const QuestionScore& row : report.rows) {
        if (row.qtype != QuestionType::summary) continue;
        auto& rec = recall_by[{row.selector, row.k}];
        rec.first += row.rouge.recall;
        ++rec.second;
        if (row.selector == "mmr-l0.5") {
            auto& f = f1_by_k[row.k];
            f.first += row.rouge.f1;
            ++f.second;
        }
    }
    for (std::size_t k = 4; k <= 7; ++k) {
        const auto greedy = recall_by[{"greedy", k}];
        const auto mmr = recall_by[{"mmr-l0.5", k}];
        if (greedy.second == 0 || mmr.second == 0 ||
            mmr.first / mmr.second <= greedy.first / greedy.second) {
            out.ok = false;
            out.detail = "MMR recall does not beat greedy at k=" + std::to_string(k);
            return out;
        }
    }
    std::size_t peak_k = 0;
    double peak_f1 = -1.0;
    for (const auto& [k, acc] : f1_by_k) {
        const double mean = acc.first / double(acc.second);
        if (mean > peak_f1) {
            peak_f1 = mean;
            peak_k = k;
        }
    }
    const double f1_first = f1_by_k[1].first / double(f1_by_k[1].second);
    const double f1_last = f1_by_k[10].first / double(f1_by_k[10].second);
    if (peak_k < 3 || peak_k > 7 || peak_f1 <= f1_first || peak_f1 <= f1_last) {
        out.ok = false;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "F1 peak %.3f at k=%zu (k=1: %.3f, k=10: %.3f)", peak_f1, peak_k,
                      f1_first, f1_last);
        out.detail = buf;
        return out;
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "MMR > greedy recall for k in [4,7]; F1 peak at k=%zu", peak_k);
    out.detail = buf;
    return out;
}

// ---- criterion 8: end-to-end determinism ----

fs::path write_synthetic_dataset() {
    nlohmann::json questions = nlohmann::json::array();
    const char* topics[] = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta"};
    std::mt19937 rng(8008);
    for (int i = 0; i < 60; ++i) {
        nlohmann::json q;
        q["id"] = "det" + std::to_string(i);
        const std::string t1 = topics[i % 7];
        const std::string t2 = topics[(i + 3) % 7];
        const std::string t3 = topics[rng() % 7];
        q["body"] = "How does " + t1 + " affect " + t2 + " levels?";
        q["snippets"] = {
            nlohmann::json{{"text", t1 + " was shown to raise " + t2 + " levels. The " + t3 +
                                         " pathway mediates this effect."}},
            nlohmann::json{{"text", "In contrast, " + t2 + " suppressed " + t1 + ". Yes, " + t3 +
                                         " is also involved in " + t1 + " regulation."}},
        };
        q["ideal_answer"] = {t1 + " raises " + t2 + " via the " + t3 + " pathway."};
        switch (i % 4) {
            case 0: q["type"] = "summary"; break;
            case 1:
                q["type"] = "yesno";
                q["exact_answer"] = (i % 8 == 1) ? "yes" : "no";
                break;
            case 2:
                q["type"] = "factoid";
                q["exact_answer"] = {t2 + " levels", t2};
                break;
            case 3:
                q["type"] = "list";
                q["exact_answer"] = {{t1}, {t2, t2 + " pathway"}};
                break;
        }
        questions.push_back(q);
    }
    const fs::path path = fs::temp_directory_path() / "bioqa_accept_det.json";
    std::ofstream out(path, std::ios::binary);
    out << nlohmann::json{{"questions", questions}}.dump(1);
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Outcome criterion_determinism() {
    Outcome out;
    const fs::path data = write_synthetic_dataset();
    RunConfig cfg;
    cfg.data = data;
    cfg.seed = 5;
    cfg.partition = Partition::dev;
    cfg.features = {FeatureKind::parse("jaccard"), FeatureKind::parse("tfidf"),
                    FeatureKind::parse("root:tf:0.1")};
    cfg.selectors = {selector_parse("greedy"), selector_parse("mmr-l0.5")};
    cfg.k_values = {1, 2, 3, 4, 5};
    cfg.word_budget = 60;

    const fs::path out_a = fs::temp_directory_path() / "bioqa_accept_det_a";
    const fs::path out_b = fs::temp_directory_path() / "bioqa_accept_det_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);

    cfg.threads = 1;
    const auto files_a = emit_report(run_experiment(cfg), out_a);
    cfg.threads = 4;  // thread count must not affect a single byte
    const auto files_b = emit_report(run_experiment(cfg), out_b);

    if (files_a.size() != files_b.size()) {
        out.ok = false;
        out.detail = "different file sets";
        return out;
    }
    for (std::size_t i = 0; i < files_a.size(); ++i) {
        if (files_a[i].filename() != files_b[i].filename()) {
            out.ok = false;
            out.detail = "file name mismatch: " + files_a[i].filename().string();
            return out;
        }
        if (slurp(files_a[i]) != slurp(files_b[i])) {
            out.ok = false;
            out.detail = "byte difference in " + files_a[i].filename().string();
            return out;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%zu report files byte-identical across reruns", files_a.size());
    out.detail = buf;
    return out;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "ROUGE-L oracle equivalence", criterion_rouge_oracle},
        {2, "Wilcoxon exact oracle and approximation band", criterion_wilcoxon_oracle},
        {3, "selection algebra (lambda=1 greedy equivalence, MMR replay)", criterion_selection_algebra},
        {4, "similarity identities and bounds", criterion_similarity_identities},
        {5, "metric consistency (hard vs soft)", criterion_metric_consistency},
        {6, "paper arithmetic spot-checks", criterion_paper_arithmetic},
        {7, "qualitative trend reproduction on BioASQ 6b", criterion_real_data_trends},
        {8, "end-to-end determinism", criterion_determinism},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome.ok = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        const char* status = outcome.skipped ? "SKIP" : outcome.ok ? "PASS" : "FAIL";
        std::printf("%s  criterion %d: %s%s%s\n", status, c.id, c.name,
                    outcome.detail.empty() ? "" : " -- ", outcome.detail.c_str());
        if (!outcome.ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
