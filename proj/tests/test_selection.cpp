#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bioqa/selection.hpp"

using namespace bioqa;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<ScoredCandidate> make_scored(const std::vector<double>& scores) {
    std::vector<ScoredCandidate> out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        ScoredCandidate sc;
        sc.sentence.raw = "s" + std::to_string(i);
        sc.sentence.tokens = tokenize(sc.sentence.raw);
        sc.score = scores[i];
        out.push_back(sc);
    }
    return out;
}

// Independent replay of the MMR recurrence, step by step.
Selection mmr_oracle(const std::vector<double>& rel, std::size_t k, double lambda,
                     const std::vector<std::vector<double>>& sim) {
    Selection sel;
    std::vector<bool> used(rel.size(), false);
    while (sel.chosen.size() < std::min(k, rel.size())) {
        double best_value = -1e300;
        std::size_t best = rel.size();
        for (std::size_t i = 0; i < rel.size(); ++i) {
            if (used[i]) continue;
            double value;
            if (sel.chosen.empty()) {
                value = rel[i];
            } else {
                double redundancy = -1e300;
                for (std::size_t j : sel.chosen) redundancy = std::max(redundancy, sim[i][j]);
                value = lambda * rel[i] - (1.0 - lambda) * redundancy;
            }
            if (value > best_value) {
                best_value = value;
                best = i;
            }
        }
        used[best] = true;
        sel.chosen.push_back(best);
        sel.trace.push_back({best, best_value});
    }
    return sel;
}

}  // namespace

TEST_CASE("greedy_select picks highest scores with index tie-break") {
    const auto scored = make_scored({0.9, 0.1, 0.5});
    const Selection sel = greedy_select(scored, 2);
    CHECK(sel.chosen == std::vector<std::size_t>{0, 2});
    REQUIRE(sel.trace.size() == 2);
    CHECK(sel.trace[0].marginal == 0.9);
    CHECK(sel.trace[1].marginal == 0.5);

    const Selection all = greedy_select(scored, 99);
    CHECK(all.chosen == std::vector<std::size_t>{0, 2, 1});

    const Selection tie = greedy_select(make_scored({0.5, 0.5}), 1);
    CHECK(tie.chosen == std::vector<std::size_t>{0});

    CHECK_THROWS_AS(greedy_select({}, 3), std::invalid_argument);
    CHECK_THROWS_AS(greedy_select(scored, 0), std::invalid_argument);
}

TEST_CASE("greedy trace is non-increasing") {
    std::mt19937 rng(17);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<double> scores(1 + rng() % 15);
        for (double& s : scores) s = (rng() % 1000) / 1000.0;
        const Selection sel = greedy_select(make_scored(scores), 1 + rng() % 10);
        for (std::size_t i = 1; i < sel.trace.size(); ++i)
            CHECK(sel.trace[i].marginal <= sel.trace[i - 1].marginal);
    }
}

TEST_CASE("mmr frozen example: 4 candidates, lambda 0.5, k 3") {
    const std::vector<double> rel = {0.9, 0.8, 0.7, 0.5};
    const std::vector<std::vector<double>> sim = {
        {1.0, 0.9, 0.1, 0.2},
        {0.9, 1.0, 0.3, 0.4},
        {0.1, 0.3, 1.0, 0.8},
        {0.2, 0.4, 0.8, 1.0},
    };
    const auto scored = make_scored(rel);
    const auto pair_sim = [&](std::size_t a, std::size_t b) { return sim[a][b]; };
    const Selection sel = mmr_select(scored, 3, 0.5, pair_sim);

    CHECK(sel.chosen == std::vector<std::size_t>{0, 2, 1});
    REQUIRE(sel.trace.size() == 3);
    CHECK_THAT(sel.trace[0].marginal, WithinAbs(0.9, 1e-12));
    CHECK_THAT(sel.trace[1].marginal, WithinAbs(0.30, 1e-12));
    CHECK_THAT(sel.trace[2].marginal, WithinAbs(-0.05, 1e-12));

    const Selection oracle = mmr_oracle(rel, 3, 0.5, sim);
    CHECK(oracle.chosen == sel.chosen);
    for (std::size_t i = 0; i < sel.trace.size(); ++i)
        CHECK(sel.trace[i].marginal == oracle.trace[i].marginal);
}

TEST_CASE("mmr with lambda 1 equals greedy exactly") {
    std::mt19937 rng(23);
    for (int iter = 0; iter < 300; ++iter) {
        const std::size_t n = 1 + rng() % 12;
        std::vector<double> rel(n);
        for (double& r : rel) r = (rng() % 1000) / 999.0;
        std::vector<std::vector<double>> sim(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) sim[i][j] = sim[j][i] = (rng() % 1000) / 999.0;
        }
        const auto scored = make_scored(rel);
        const std::size_t k = 1 + rng() % (n + 2);
        const Selection greedy = greedy_select(scored, k);
        const Selection mmr = mmr_select(scored, k, 1.0, [&](std::size_t a, std::size_t b) { return sim[a][b]; });
        CHECK(greedy.chosen == mmr.chosen);
        for (std::size_t i = 0; i < greedy.trace.size(); ++i)
            CHECK(greedy.trace[i].marginal == mmr.trace[i].marginal);
    }
}

TEST_CASE("mmr trace matches the oracle across lambdas") {
    std::mt19937 rng(29);
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t n = 2 + rng() % 10;
        std::vector<double> rel(n);
        for (double& r : rel) r = (rng() % 1000) / 999.0;
        std::vector<std::vector<double>> sim(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) sim[i][j] = sim[j][i] = (rng() % 1000) / 999.0;
        }
        const auto scored = make_scored(rel);
        for (const double lambda : {0.0, 0.3, 0.5, 0.7}) {
            const std::size_t k = 1 + rng() % n;
            const Selection got =
                mmr_select(scored, k, lambda, [&](std::size_t a, std::size_t b) { return sim[a][b]; });
            const Selection oracle = mmr_oracle(rel, k, lambda, sim);
            REQUIRE(got.chosen == oracle.chosen);
            for (std::size_t i = 0; i < got.trace.size(); ++i)
                CHECK_THAT(got.trace[i].marginal, WithinAbs(oracle.trace[i].marginal, 1e-12));
            // distinct indices
            auto sorted = got.chosen;
            std::sort(sorted.begin(), sorted.end());
            CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
            // penalty never raises a step above its pure relevance
            for (std::size_t i = 1; i < got.trace.size(); ++i)
                CHECK(got.trace[i].marginal <= rel[got.trace[i].index] + 1e-12);
        }
    }
}

TEST_CASE("mmr smaller k is a prefix of larger k") {
    std::mt19937 rng(31);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t n = 3 + rng() % 8;
        std::vector<double> rel(n);
        for (double& r : rel) r = (rng() % 1000) / 999.0;
        std::vector<std::vector<double>> sim(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) sim[i][j] = sim[j][i] = (rng() % 1000) / 999.0;
        }
        const auto scored = make_scored(rel);
        const auto pair_sim = [&](std::size_t a, std::size_t b) { return sim[a][b]; };
        const Selection small = mmr_select(scored, 2, 0.4, pair_sim);
        const Selection large = mmr_select(scored, n, 0.4, pair_sim);
        REQUIRE(large.chosen.size() >= small.chosen.size());
        CHECK(std::equal(small.chosen.begin(), small.chosen.end(), large.chosen.begin()));
    }
}

TEST_CASE("mmr k=1 is the relevance argmax for any lambda") {
    const auto scored = make_scored({0.2, 0.8, 0.5});
    for (const double lambda : {0.0, 0.5, 1.0}) {
        const Selection sel = mmr_select(scored, 1, lambda, [](std::size_t, std::size_t) { return 0.9; });
        CHECK(sel.chosen == std::vector<std::size_t>{1});
        CHECK(sel.trace[0].marginal == 0.8);
    }
}

TEST_CASE("mmr validates inputs") {
    const auto scored = make_scored({0.5});
    const auto zero_sim = [](std::size_t, std::size_t) { return 0.0; };
    CHECK_THROWS_AS(mmr_select({}, 2, 0.5, zero_sim), std::invalid_argument);
    CHECK_THROWS_AS(mmr_select(scored, 2, -0.1, zero_sim), std::invalid_argument);
    CHECK_THROWS_AS(mmr_select(scored, 2, 1.5, zero_sim), std::invalid_argument);
    CHECK_THROWS_AS(mmr_select(scored, 0, 0.5, zero_sim), std::invalid_argument);
}

TEST_CASE("sentence-level mmr uses the redundancy feature") {
    // Two near-duplicate high scorers plus one diverse sentence: greedy takes
    // the duplicates, MMR at low lambda prefers diversity.
    std::vector<Sentence> pool;
    for (const char* raw : {"alpha beta gamma delta", "alpha beta gamma epsilon", "zeta eta theta"}) {
        Sentence s;
        s.raw = raw;
        s.tokens = tokenize(raw);
        pool.push_back(s);
    }
    std::vector<ScoredCandidate> scored = make_scored({0.9, 0.85, 0.4});
    for (std::size_t i = 0; i < pool.size(); ++i) scored[i].sentence = pool[i];

    SelectionConfig cfg;
    cfg.method = SelectorMethod::mmr;
    cfg.k = 2;
    cfg.lambda = 0.3;
    cfg.redundancy_feature = FeatureKind::parse("jaccard");
    const Selection sel = mmr_select(scored, pool, cfg);
    CHECK(sel.chosen == std::vector<std::size_t>{0, 2});

    const Selection greedy = greedy_select(scored, 2);
    CHECK(greedy.chosen == std::vector<std::size_t>{0, 1});
}
