#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bioqa/tiler.hpp"

using namespace bioqa;

namespace {

std::vector<Sentence> make_pool(std::initializer_list<const char*> raws) {
    std::vector<Sentence> pool;
    for (const char* raw : raws) {
        Sentence s;
        s.raw = raw;
        s.tokens = tokenize(raw);
        pool.push_back(s);
    }
    return pool;
}

Selection pick(std::initializer_list<std::size_t> indices) {
    Selection sel;
    for (std::size_t i : indices) {
        sel.chosen.push_back(i);
        sel.trace.push_back({i, 0.0});
    }
    return sel;
}

}  // namespace

TEST_CASE("tile concatenates raw sentences in selection order") {
    const auto pool = make_pool({"A b.", "C d."});
    const AnswerText answer = tile(pick({0, 1}), pool);
    CHECK(answer.text == "A b. C d.");
    CHECK(answer.word_count == 4);
    CHECK_FALSE(answer.truncated);

    const AnswerText reversed = tile(pick({1, 0}), pool);
    CHECK(reversed.text == "C d. A b.");
}

TEST_CASE("tile stops at the word budget on sentence boundaries") {
    const auto pool = make_pool({"A b.", "C d."});
    const AnswerText answer = tile(pick({0, 1}), pool, 2);
    CHECK(answer.text == "A b.");
    CHECK(answer.word_count == 2);
    CHECK(answer.truncated);

    const AnswerText exact = tile(pick({0, 1}), pool, 4);
    CHECK(exact.text == "A b. C d.");
    CHECK_FALSE(exact.truncated);
}

TEST_CASE("tile always emits the first sentence") {
    const auto pool = make_pool({"one two three four five six seven eight nine ten"});
    const AnswerText answer = tile(pick({0}), pool, 3);
    CHECK(answer.text == pool[0].raw);
    CHECK(answer.word_count == 10);
    CHECK_FALSE(answer.truncated);
}

TEST_CASE("tile validates inputs") {
    const auto pool = make_pool({"A b."});
    CHECK_THROWS_AS(tile(Selection{}, pool), std::invalid_argument);
    CHECK_THROWS_AS(tile(pick({4}), pool), std::out_of_range);
    CHECK_THROWS_AS(tile(pick({0}), pool, 0), std::invalid_argument);
}

TEST_CASE("tile output contains each chosen sentence verbatim in order") {
    std::mt19937 rng(37);
    const auto pool = make_pool({"Alpha beta gamma.", "Delta epsilon.", "Zeta eta theta iota.",
                                 "Kappa.", "Lambda mu nu xi omicron."});
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<std::size_t> order = {0, 1, 2, 3, 4};
        for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);
        order.resize(1 + rng() % order.size());
        Selection sel;
        for (std::size_t i : order) sel.chosen.push_back(i);
        const AnswerText answer = tile(sel, pool);
        std::size_t cursor = 0;
        std::size_t words = 0;
        for (std::size_t i : order) {
            const std::size_t at = answer.text.find(pool[i].raw, cursor);
            REQUIRE(at != std::string::npos);
            cursor = at + pool[i].raw.size();
            words += detail::whitespace_word_count(pool[i].raw);
        }
        CHECK(cursor == answer.text.size());
        CHECK(answer.word_count == words);
    }
}
