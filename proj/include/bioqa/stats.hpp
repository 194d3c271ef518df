#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bioqa/metrics.hpp"

namespace bioqa {

/// Per-question scores under two configurations, aligned index-by-index.
struct PairedSample {
    std::vector<double> a;
    std::vector<double> b;
};

/// mean(b) - mean(a).
inline double mean_diff(const PairedSample& sample) {
    if (sample.a.size() != sample.b.size())
        throw std::invalid_argument("mean_diff: samples of different length");
    if (sample.a.empty()) throw std::invalid_argument("mean_diff: empty sample");
    const double n = static_cast<double>(sample.a.size());
    const double mean_a = std::accumulate(sample.a.begin(), sample.a.end(), 0.0) / n;
    const double mean_b = std::accumulate(sample.b.begin(), sample.b.end(), 0.0) / n;
    return mean_b - mean_a;
}

enum class WilcoxonMethod { automatic, exact, normal_approx };

struct WilcoxonResult {
    double w_statistic = 0.0;  // min of positive/negative rank sums
    double p_value = 1.0;      // two-sided
    std::size_t n_effective = 0;
    double mean_diff = 0.0;
    WilcoxonMethod method = WilcoxonMethod::exact;
};

namespace detail {

// Average ranks of |d| (ascending), ties share the mean rank.
inline std::vector<double> average_ranks(const std::vector<double>& abs_d) {
    const std::size_t n = abs_d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return abs_d[x] < abs_d[y]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && abs_d[order[j + 1]] == abs_d[order[i]]) ++j;
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
        i = j + 1;
    }
    return ranks;
}

// Exact two-sided p over the 2^n equiprobable sign assignments, counted with
// a rank-sum distribution DP on ranks scaled to integers (x2).
inline double wilcoxon_exact_p(const std::vector<double>& ranks, double w_min) {
    const std::size_t n = ranks.size();
    std::vector<long long> scaled(n);
    long long total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double two_r = 2.0 * ranks[i];
        scaled[i] = std::llround(two_r);
        total += scaled[i];
    }
    const long long w_scaled = std::llround(2.0 * w_min);
    std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
    count[0] = 1.0;
    long long reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
        reach += scaled[i];
        for (long long s = reach; s >= scaled[i]; --s) {
            count[static_cast<std::size_t>(s)] += count[static_cast<std::size_t>(s - scaled[i])];
        }
    }
    double extreme = 0.0;
    for (long long s = 0; s <= total; ++s) {
        if (std::min(s, total - s) <= w_scaled) extreme += count[static_cast<std::size_t>(s)];
    }
    return extreme / std::pow(2.0, static_cast<double>(n));
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace detail

/// Two-sided Wilcoxon signed-rank test on d = b - a. Zero differences are
/// dropped; |d| is ranked with average ranks for ties; W is the smaller of
/// the positive/negative rank sums. Exact enumeration of sign assignments up
/// to n_effective = 20 (or when forced), otherwise a normal approximation
/// with continuity correction and tie-corrected variance.
inline WilcoxonResult wilcoxon_signed_rank(const PairedSample& sample,
                                           WilcoxonMethod method = WilcoxonMethod::automatic) {
    if (sample.a.size() != sample.b.size())
        throw std::invalid_argument("wilcoxon_signed_rank: samples of different length");
    if (sample.a.size() < 2) throw std::invalid_argument("wilcoxon_signed_rank: need at least 2 pairs");
    std::vector<double> diffs;
    diffs.reserve(sample.a.size());
    for (std::size_t i = 0; i < sample.a.size(); ++i) {
        const double d = sample.b[i] - sample.a[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty())
        throw std::invalid_argument("wilcoxon_signed_rank: degenerate sample (all differences zero)");

    const std::size_t n = diffs.size();
    std::vector<double> abs_d(n);
    for (std::size_t i = 0; i < n; ++i) abs_d[i] = std::abs(diffs[i]);
    const std::vector<double> ranks = detail::average_ranks(abs_d);

    double w_pos = 0.0;
    double w_neg = 0.0;
    for (std::size_t i = 0; i < n; ++i) (diffs[i] > 0.0 ? w_pos : w_neg) += ranks[i];
    const double w = std::min(w_pos, w_neg);

    WilcoxonResult result;
    result.w_statistic = w;
    result.n_effective = n;
    result.mean_diff = mean_diff(sample);

    const bool exact = method == WilcoxonMethod::exact || (method == WilcoxonMethod::automatic && n <= 20);
    if (exact) {
        result.method = WilcoxonMethod::exact;
        result.p_value = detail::wilcoxon_exact_p(ranks, w);
    } else {
        result.method = WilcoxonMethod::normal_approx;
        const double nn = static_cast<double>(n);
        const double mean = nn * (nn + 1.0) / 4.0;
        double tie_term = 0.0;
        std::map<double, std::size_t> tie_sizes;
        for (double r : abs_d) ++tie_sizes[r];
        for (const auto& [_, t] : tie_sizes) {
            const double td = static_cast<double>(t);
            tie_term += (td * td * td - td) / 48.0;
        }
        const double variance = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term;
        const double z = (w - mean + 0.5) / std::sqrt(variance);
        result.p_value = std::clamp(2.0 * detail::normal_cdf(z), 0.0, 1.0);
    }
    return result;
}

/// Identifies one pipeline configuration in per-question rows.
struct ConfigId {
    std::string feature;
    std::string selector;

    friend bool operator==(const ConfigId&, const ConfigId&) = default;

    std::string str() const { return feature + "/" + selector; }

    /// Parses "<feature-id>/<selector-id>".
    static ConfigId parse(std::string_view s) {
        const std::size_t slash = s.rfind('/');
        if (slash == std::string_view::npos || slash == 0 || slash + 1 == s.size())
            throw std::invalid_argument("bad config id \"" + std::string(s) +
                                        "\": expected <feature>/<selector>");
        return ConfigId{std::string(s.substr(0, slash)), std::string(s.substr(slash + 1))};
    }
};

enum class ScoreField { precision, recall, f1 };

inline double score_field(const QuestionScore& row, ScoreField field) {
    switch (field) {
        case ScoreField::precision: return row.rouge.precision;
        case ScoreField::recall: return row.rouge.recall;
        case ScoreField::f1: return row.rouge.f1;
    }
    return 0.0;
}

struct SignificanceOptions {
    ScoreField metric = ScoreField::recall;
    /// Report p = 1.0 instead of failing when every difference is zero.
    bool degenerate_p_one = false;
};

struct ComparisonRow {
    std::size_t k = 0;
    double base_mean = 0.0;
    double challenger_mean = 0.0;
    double mean_diff = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

/// One row per k comparing challenger against baseline on the chosen ROUGE
/// field: means, mean difference, and the Wilcoxon two-sided p. Both configs
/// must cover the same question set at each k.
inline std::vector<ComparisonRow> significance_table(std::span<const QuestionScore> rows,
                                                     const ConfigId& baseline, const ConfigId& challenger,
                                                     std::span<const std::size_t> k_values,
                                                     const SignificanceOptions& options = {}) {
    std::vector<ComparisonRow> table;
    for (const std::size_t k : k_values) {
        std::map<std::string, double> base_scores;
        std::map<std::string, double> chal_scores;
        for (const QuestionScore& row : rows) {
            if (row.k != k) continue;
            if (row.feature == baseline.feature && row.selector == baseline.selector)
                base_scores[row.qid] = score_field(row, options.metric);
            if (row.feature == challenger.feature && row.selector == challenger.selector)
                chal_scores[row.qid] = score_field(row, options.metric);
        }
        if (base_scores.empty())
            throw std::invalid_argument("significance_table: no rows for " + baseline.str() + " at k=" +
                                        std::to_string(k));
        if (base_scores.size() != chal_scores.size())
            throw std::invalid_argument("significance_table: question sets differ at k=" + std::to_string(k));
        PairedSample sample;
        for (const auto& [qid, score] : base_scores) {
            const auto it = chal_scores.find(qid);
            if (it == chal_scores.end())
                throw std::invalid_argument("significance_table: question " + qid + " missing for " +
                                            challenger.str() + " at k=" + std::to_string(k));
            sample.a.push_back(score);
            sample.b.push_back(it->second);
        }
        ComparisonRow row;
        row.k = k;
        row.n = sample.a.size();
        const double n = static_cast<double>(sample.a.size());
        row.base_mean = std::accumulate(sample.a.begin(), sample.a.end(), 0.0) / n;
        row.challenger_mean = std::accumulate(sample.b.begin(), sample.b.end(), 0.0) / n;
        row.mean_diff = row.challenger_mean - row.base_mean;
        try {
            row.p_value = wilcoxon_signed_rank(sample).p_value;
        } catch (const std::invalid_argument&) {
            if (!options.degenerate_p_one) throw;
            row.p_value = 1.0;
        }
        table.push_back(row);
    }
    return table;
}

}  // namespace bioqa
