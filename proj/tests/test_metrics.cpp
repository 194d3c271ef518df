#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <random>

#include "bioqa/metrics.hpp"

using namespace bioqa;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<Token> toks(std::initializer_list<const char*> words) {
    std::vector<Token> out;
    for (const char* w : words) out.push_back(Token{w});
    return out;
}

// Independent LCS oracle: top-down recursion with memoization.
std::size_t lcs_oracle(const std::vector<Token>& x, const std::vector<Token>& y) {
    std::vector<std::vector<int>> memo(x.size() + 1, std::vector<int>(y.size() + 1, -1));
    std::function<std::size_t(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == x.size() || j == y.size()) return 0;
        int& m = memo[i][j];
        if (m >= 0) return static_cast<std::size_t>(m);
        std::size_t best;
        if (x[i] == y[j]) {
            best = 1 + rec(i + 1, j + 1);
        } else {
            best = std::max(rec(i + 1, j), rec(i, j + 1));
        }
        m = static_cast<int>(best);
        return best;
    };
    return rec(0, 0);
}

std::vector<Token> random_tokens(std::mt19937& rng, std::size_t max_len, std::size_t vocab) {
    std::vector<Token> out;
    const std::size_t len = rng() % (max_len + 1);
    for (std::size_t i = 0; i < len; ++i) out.push_back(Token{"w" + std::to_string(rng() % vocab)});
    return out;
}

}  // namespace

TEST_CASE("lcs_length basics") {
    CHECK(lcs_length(toks({"the", "cat", "sat"}), toks({"the", "cat", "ran"})) == 2);
    const auto x = toks({"a", "b", "c", "d"});
    CHECK(lcs_length(x, x) == 4);
    CHECK(lcs_length(x, {}) == 0);
    CHECK(lcs_length({}, x) == 0);
    CHECK(lcs_length(toks({"a", "c", "b"}), toks({"c", "a", "b"})) == 2);
}

TEST_CASE("lcs_length agrees with the recursive oracle") {
    std::mt19937 rng(41);
    for (int iter = 0; iter < 300; ++iter) {
        const auto x = random_tokens(rng, 14, 5);
        const auto y = random_tokens(rng, 14, 5);
        const std::size_t got = lcs_length(x, y);
        CHECK(got == lcs_oracle(x, y));
        CHECK(got == lcs_length(y, x));
        CHECK(got <= std::min(x.size(), y.size()));
    }
}

TEST_CASE("rouge_l frozen examples") {
    const RougeL identical = rouge_l("The same text here", "the same text here!");
    CHECK_THAT(identical.precision, WithinAbs(1.0, 1e-12));
    CHECK_THAT(identical.recall, WithinAbs(1.0, 1e-12));
    CHECK_THAT(identical.f1, WithinAbs(1.0, 1e-12));

    // ref 3 tokens, pred 4 tokens, LCS 2
    const RougeL r = rouge_l("a b c", "a b d e");
    CHECK_THAT(r.recall, WithinAbs(2.0 / 3.0, 1e-12));
    CHECK_THAT(r.precision, WithinAbs(0.5, 1e-12));
    CHECK_THAT(r.f1, WithinAbs(4.0 / 7.0, 1e-12));

    const RougeL zero = rouge_l("alpha beta", "gamma delta");
    CHECK(zero.precision == 0.0);
    CHECK(zero.recall == 0.0);
    CHECK(zero.f1 == 0.0);

    const RougeL empty = rouge_l("", "anything");
    CHECK(empty.recall == 0.0);
    CHECK(empty.f1 == 0.0);
}

TEST_CASE("rouge_l swaps precision and recall when arguments swap") {
    std::mt19937 rng(43);
    const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta", "epsilon"};
    for (int iter = 0; iter < 200; ++iter) {
        auto text = [&] {
            std::string s;
            const std::size_t len = rng() % 10;
            for (std::size_t i = 0; i < len; ++i) s += vocab[rng() % vocab.size()] + " ";
            return s;
        };
        const std::string a = text();
        const std::string b = text();
        const RougeL ab = rouge_l(a, b);
        const RougeL ba = rouge_l(b, a);
        CHECK(ab.precision == ba.recall);
        CHECK(ab.recall == ba.precision);
        CHECK(ab.f1 == ba.f1);
        for (double v : {ab.precision, ab.recall, ab.f1}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("rouge_l_best keeps the max-f1 triple") {
    const std::vector<std::string> refs = {"gamma delta epsilon", "a b c"};
    const RougeL best = rouge_l_best(refs, "a b d e");
    CHECK_THAT(best.f1, WithinAbs(4.0 / 7.0, 1e-12));
    CHECK_THAT(best.precision, WithinAbs(0.5, 1e-12));

    const RougeL none = rouge_l_best({}, "a b");
    CHECK(none.f1 == 0.0);
}

TEST_CASE("exact_match frozen examples") {
    const auto yes = exact_match("the answer is yes indeed", ExactAnswer{{{"yes"}}});
    CHECK(yes.soft_hit);
    CHECK(yes.hard_hit);

    // partial capture: one of two groups present
    const ExactAnswer drugs{{{"5-azacytidine"}, {"zebularine", "2-(1H)-pyrimidinone riboside"}}};
    const auto partial = exact_match("inhibitors include zebularine only", drugs);
    CHECK(partial.soft_hit);
    CHECK_FALSE(partial.hard_hit);

    const auto both = exact_match("both 5-azacytidine and zebularine were seen", drugs);
    CHECK(both.soft_hit);
    CHECK(both.hard_hit);

    // synonym with punctuation matches through normalization
    const auto synonym = exact_match("found 2-(1H)-pyrimidinone riboside here", drugs);
    CHECK(synonym.soft_hit);

    const auto miss = exact_match("unknown", ExactAnswer{{{"yes"}}});
    CHECK_FALSE(miss.soft_hit);
    CHECK_FALSE(miss.hard_hit);

    CHECK_THROWS_AS(exact_match("anything", ExactAnswer{}), std::invalid_argument);
}

TEST_CASE("exact_match requires token boundaries") {
    const ExactAnswer no{{{"no"}}};
    CHECK_FALSE(exact_match("nonspecific colitis was reported", no).soft_hit);
    CHECK(exact_match("no colitis was reported", no).soft_hit);
    // multi-token synonyms must appear contiguously
    const ExactAnswer phrase{{{"tyrosine kinase"}}};
    CHECK(exact_match("a tyrosine kinase inhibitor", phrase).soft_hit);
    CHECK_FALSE(exact_match("tyrosine and also kinase", phrase).soft_hit);
}

TEST_CASE("aggregate_accuracy means and edge cases") {
    auto row = [](bool soft, bool hard) {
        QuestionScore qs;
        qs.qid = "q";
        qs.qtype = QuestionType::yesno;
        qs.soft_hit = soft;
        qs.hard_hit = hard;
        return qs;
    };
    const std::vector<QuestionScore> two = {row(true, false), row(false, false)};
    const AccuracyPair pair = aggregate_accuracy(two);
    CHECK_THAT(pair.soft, WithinAbs(0.5, 1e-12));
    CHECK(pair.hard == 0.0);
    CHECK(pair.n_questions == 2);

    const std::vector<QuestionScore> all = {row(true, true), row(true, true)};
    const AccuracyPair saturated = aggregate_accuracy(all);
    CHECK(saturated.soft == 1.0);
    CHECK(saturated.hard == 1.0);

    // 2 soft hits out of 47 yes/no questions
    std::vector<QuestionScore> yesno(47, row(false, false));
    yesno[5] = row(true, true);
    yesno[11] = row(true, true);
    const AccuracyPair paper = aggregate_accuracy(yesno);
    CHECK_THAT(paper.soft, WithinAbs(2.0 / 47.0, 1e-12));
    CHECK_THAT(paper.soft, WithinAbs(0.042, 1e-3));
    CHECK(paper.hard <= paper.soft);

    CHECK_THROWS_AS(aggregate_accuracy({}), std::invalid_argument);
    QuestionScore summary_row;
    summary_row.qtype = QuestionType::summary;
    const std::vector<QuestionScore> bad = {summary_row};
    CHECK_THROWS_AS(aggregate_accuracy(bad), std::invalid_argument);
}

TEST_CASE("single-group questions have equal soft and hard") {
    std::mt19937 rng(47);
    const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta"};
    for (int iter = 0; iter < 300; ++iter) {
        std::string pred;
        const std::size_t len = rng() % 8;
        for (std::size_t i = 0; i < len; ++i) pred += vocab[rng() % vocab.size()] + " ";
        ExactAnswer exact;
        exact.groups.push_back({vocab[rng() % vocab.size()], vocab[rng() % vocab.size()]});
        const MatchResult m = exact_match(pred, exact);
        CHECK(m.soft_hit == m.hard_hit);
        if (m.hard_hit) CHECK(m.soft_hit);
    }
}
