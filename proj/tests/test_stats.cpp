#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "bioqa/stats.hpp"

using namespace bioqa;
using Catch::Matchers::WithinAbs;

namespace {

// Brute-force two-sided p: enumerate every sign assignment of the ranked
// absolute differences and count those at least as extreme as observed.
double wilcoxon_brute_force(std::vector<double> diffs) {
    std::erase(diffs, 0.0);
    const std::size_t n = diffs.size();
    REQUIRE(n >= 1);
    REQUIRE(n <= 20);
    std::vector<double> abs_d(n);
    for (std::size_t i = 0; i < n; ++i) abs_d[i] = std::abs(diffs[i]);
    // average ranks, reimplemented
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
    double w_pos = 0, w_neg = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total += rank[i];
        (diffs[i] > 0 ? w_pos : w_neg) += rank[i];
    }
    const double w_obs = std::min(w_pos, w_neg);
    std::size_t extreme = 0;
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::size_t(1) << i)) s += rank[i];
        }
        if (std::min(s, total - s) <= w_obs + 1e-12) ++extreme;
    }
    return double(extreme) / double(std::size_t(1) << n);
}

PairedSample from_diffs(const std::vector<double>& diffs) {
    PairedSample s;
    for (double d : diffs) {
        s.a.push_back(0.5);
        s.b.push_back(0.5 + d);
    }
    return s;
}

QuestionScore score_row(const std::string& qid, const std::string& feature, const std::string& selector,
                        std::size_t k, double recall) {
    QuestionScore row;
    row.qid = qid;
    row.qtype = QuestionType::summary;
    row.feature = feature;
    row.selector = selector;
    row.k = k;
    row.rouge.recall = recall;
    row.rouge.precision = recall / 2.0;
    row.rouge.f1 = recall / 3.0;
    return row;
}

}  // namespace

TEST_CASE("mean_diff matches the paper's k=5 sentence-selection row") {
    // Greedy mean 0.573, MMR mean 0.612 -> mean-diff 0.039
    const PairedSample sample{{0.573, 0.573}, {0.612, 0.612}};
    CHECK_THAT(mean_diff(sample), WithinAbs(0.039, 1e-12));
}

TEST_CASE("mean_diff basics") {
    CHECK(mean_diff(PairedSample{{0.4, 0.6}, {0.4, 0.6}}) == 0.0);
    CHECK_THAT(mean_diff(PairedSample{{0, 1}, {1, 2}}), WithinAbs(1.0, 1e-12));
    CHECK_THROWS_AS(mean_diff(PairedSample{{1}, {1, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(mean_diff(PairedSample{}), std::invalid_argument);

    std::mt19937 rng(51);
    for (int iter = 0; iter < 100; ++iter) {
        PairedSample s;
        const std::size_t n = 2 + rng() % 10;
        for (std::size_t i = 0; i < n; ++i) {
            s.a.push_back((rng() % 100) / 99.0);
            s.b.push_back((rng() % 100) / 99.0);
        }
        const PairedSample swapped{s.b, s.a};
        CHECK_THAT(mean_diff(s), WithinAbs(-mean_diff(swapped), 1e-12));
    }
}

TEST_CASE("wilcoxon frozen example: five positive differences") {
    const auto result = wilcoxon_signed_rank(from_diffs({1, 2, 3, 4, 5}));
    CHECK(result.w_statistic == 0.0);
    CHECK(result.n_effective == 5);
    CHECK(result.method == WilcoxonMethod::exact);
    CHECK_THAT(result.p_value, WithinAbs(0.0625, 1e-12));  // 2 of 32 sign assignments
}

TEST_CASE("wilcoxon frozen example with ties") {
    // |d| = [1,1,2,2] -> ranks [1.5,1.5,3.5,3.5], W = 1.5, p = 6/16
    const auto result = wilcoxon_signed_rank(from_diffs({1, -1, 2, 2}));
    CHECK_THAT(result.w_statistic, WithinAbs(1.5, 1e-12));
    CHECK_THAT(result.p_value, WithinAbs(0.375, 1e-12));
}

TEST_CASE("wilcoxon degenerate and validation errors") {
    CHECK_THROWS_WITH(wilcoxon_signed_rank(from_diffs({0, 0, 0})),
                      Catch::Matchers::ContainsSubstring("degenerate"));
    CHECK_THROWS_AS(wilcoxon_signed_rank(PairedSample{{1}, {2}}), std::invalid_argument);
    CHECK_THROWS_AS(wilcoxon_signed_rank(PairedSample{{1, 2}, {2}}), std::invalid_argument);
}

TEST_CASE("wilcoxon exact matches brute force on random samples") {
    std::mt19937 rng(53);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t n = 2 + rng() % 11;
        std::vector<double> diffs(n);
        for (double& d : diffs) {
            d = ((rng() % 9) - 4) / 4.0;  // ties and zeros likely
        }
        if (std::all_of(diffs.begin(), diffs.end(), [](double d) { return d == 0.0; })) diffs[0] = 0.25;
        const auto result = wilcoxon_signed_rank(from_diffs(diffs), WilcoxonMethod::exact);
        CHECK_THAT(result.p_value, WithinAbs(wilcoxon_brute_force(diffs), 1e-12));
    }
}

TEST_CASE("wilcoxon p is invariant under swapping and affine transforms") {
    std::mt19937 rng(59);
    for (int iter = 0; iter < 50; ++iter) {
        const std::size_t n = 5 + rng() % 10;
        PairedSample s;
        for (std::size_t i = 0; i < n; ++i) {
            s.a.push_back((rng() % 1000) / 999.0);
            s.b.push_back((rng() % 1000) / 999.0);
        }
        bool degenerate = true;
        for (std::size_t i = 0; i < n; ++i) degenerate = degenerate && s.a[i] == s.b[i];
        if (degenerate) s.b[0] += 0.5;

        const auto base = wilcoxon_signed_rank(s);
        const auto swapped = wilcoxon_signed_rank(PairedSample{s.b, s.a});
        CHECK(base.p_value == swapped.p_value);
        CHECK(base.w_statistic == swapped.w_statistic);

        PairedSample scaled;
        for (std::size_t i = 0; i < n; ++i) {
            scaled.a.push_back(2.0 * s.a[i] + 3.0);
            scaled.b.push_back(2.0 * s.b[i] + 3.0);
        }
        const auto affine = wilcoxon_signed_rank(scaled);
        CHECK(affine.p_value == base.p_value);
        CHECK(affine.w_statistic == base.w_statistic);
    }
}

TEST_CASE("wilcoxon normal approximation tracks the exact test for n in [15,20]") {
    std::mt19937 rng(61);
    for (int iter = 0; iter < 60; ++iter) {
        const std::size_t n = 15 + rng() % 6;
        std::vector<double> diffs(n);
        std::normal_distribution<double> gauss(0.05, 0.2);
        for (double& d : diffs) {
            do {
                d = gauss(rng);
            } while (d == 0.0);
        }
        const auto sample = from_diffs(diffs);
        const auto exact = wilcoxon_signed_rank(sample, WilcoxonMethod::exact);
        const auto approx = wilcoxon_signed_rank(sample, WilcoxonMethod::normal_approx);
        CHECK_THAT(approx.p_value, WithinAbs(exact.p_value, 0.02));
    }
}

TEST_CASE("wilcoxon switches to the normal approximation past n=20") {
    std::mt19937 rng(67);
    PairedSample s;
    for (int i = 0; i < 45; ++i) {
        s.a.push_back((rng() % 1000) / 999.0);
        s.b.push_back((rng() % 1000) / 999.0);
    }
    const auto result = wilcoxon_signed_rank(s);
    CHECK(result.method == WilcoxonMethod::normal_approx);
    CHECK(result.p_value >= 0.0);
    CHECK(result.p_value <= 1.0);

    PairedSample small{{0.1, 0.2, 0.3}, {0.2, 0.1, 0.5}};
    CHECK(wilcoxon_signed_rank(small).method == WilcoxonMethod::exact);
}

TEST_CASE("significance_table has one row per k") {
    std::vector<QuestionScore> rows;
    std::mt19937 rng(71);
    for (std::size_t k = 4; k <= 7; ++k) {
        for (int qi = 0; qi < 12; ++qi) {
            const std::string qid = "q" + std::to_string(qi);
            const double base = (rng() % 1000) / 999.0;
            rows.push_back(score_row(qid, "jaccard", "greedy", k, base));
            rows.push_back(score_row(qid, "jaccard", "mmr-l0.5", k, base + 0.01 * (qi % 3)));
        }
    }
    const std::vector<std::size_t> ks = {4, 5, 6, 7};
    const auto table = significance_table(rows, ConfigId{"jaccard", "greedy"},
                                          ConfigId{"jaccard", "mmr-l0.5"}, ks);
    REQUIRE(table.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(table[i].k == ks[i]);
        CHECK(table[i].n == 12);
        CHECK_THAT(table[i].mean_diff, WithinAbs(table[i].challenger_mean - table[i].base_mean, 1e-12));
    }
}

TEST_CASE("significance_table uniform +0.01 challenger matches hand enumeration") {
    // six questions, all differences +0.01: W = 0, p = 2/2^6
    std::vector<QuestionScore> rows;
    for (int qi = 0; qi < 6; ++qi) {
        const std::string qid = "q" + std::to_string(qi);
        const double base = 0.1 * qi;
        rows.push_back(score_row(qid, "jaccard", "greedy", 5, base));
        rows.push_back(score_row(qid, "jaccard", "mmr-l0.5", 5, base + 0.01));
    }
    const std::vector<std::size_t> ks = {5};
    const auto table =
        significance_table(rows, ConfigId{"jaccard", "greedy"}, ConfigId{"jaccard", "mmr-l0.5"}, ks);
    REQUIRE(table.size() == 1);
    CHECK_THAT(table[0].p_value, WithinAbs(2.0 / 64.0, 1e-12));
    CHECK_THAT(table[0].mean_diff, WithinAbs(0.01, 1e-12));
}

TEST_CASE("significance_table degenerate and mismatch handling") {
    std::vector<QuestionScore> rows;
    for (int qi = 0; qi < 5; ++qi) {
        const std::string qid = "q" + std::to_string(qi);
        rows.push_back(score_row(qid, "jaccard", "greedy", 3, 0.4));
        rows.push_back(score_row(qid, "dice", "greedy", 3, 0.4));
    }
    const std::vector<std::size_t> ks = {3};
    CHECK_THROWS_AS(
        significance_table(rows, ConfigId{"jaccard", "greedy"}, ConfigId{"dice", "greedy"}, ks),
        std::invalid_argument);

    SignificanceOptions lenient;
    lenient.degenerate_p_one = true;
    const auto table =
        significance_table(rows, ConfigId{"jaccard", "greedy"}, ConfigId{"dice", "greedy"}, ks, lenient);
    CHECK(table[0].p_value == 1.0);

    rows.pop_back();  // dice loses one question
    CHECK_THROWS_WITH(
        significance_table(rows, ConfigId{"jaccard", "greedy"}, ConfigId{"dice", "greedy"}, ks, lenient),
        Catch::Matchers::ContainsSubstring("question sets differ"));

    CHECK_THROWS_WITH(significance_table(rows, ConfigId{"tf", "greedy"}, ConfigId{"dice", "greedy"}, ks),
                      Catch::Matchers::ContainsSubstring("no rows"));
}

TEST_CASE("config id parse and format") {
    const ConfigId id = ConfigId::parse("root:jaccard:0.1/mmr-l0.5");
    CHECK(id.feature == "root:jaccard:0.1");
    CHECK(id.selector == "mmr-l0.5");
    CHECK(id.str() == "root:jaccard:0.1/mmr-l0.5");
    CHECK_THROWS_AS(ConfigId::parse("nofeature"), std::invalid_argument);
    CHECK_THROWS_AS(ConfigId::parse("/greedy"), std::invalid_argument);
}
