#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "bioqa/features.hpp"

using namespace bioqa;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<Token> toks(std::initializer_list<const char*> words) {
    std::vector<Token> out;
    for (const char* w : words) out.push_back(Token{w});
    return out;
}

std::vector<Token> random_tokens(std::mt19937& rng, std::size_t max_len, std::size_t vocab) {
    std::vector<Token> out;
    const std::size_t len = rng() % (max_len + 1);
    for (std::size_t i = 0; i < len; ++i) out.push_back(Token{"w" + std::to_string(rng() % vocab)});
    return out;
}

}  // namespace

TEST_CASE("jaccard on token sets") {
    CHECK_THAT(jaccard(toks({"a", "b", "c"}), toks({"b", "c", "d"})), WithinAbs(0.5, 1e-12));
    CHECK(jaccard(toks({"x", "y"}), toks({"x", "y"})) == 1.0);
    CHECK(jaccard(toks({"x"}), toks({"y"})) == 0.0);
    CHECK(jaccard({}, {}) == 0.0);
    // set semantics: duplicates are collapsed
    CHECK(jaccard(toks({"a", "a", "b"}), toks({"a", "b"})) == 1.0);
}

TEST_CASE("dice on token sets") {
    CHECK_THAT(dice(toks({"a", "b", "c"}), toks({"b", "c", "d"})), WithinAbs(2.0 / 3.0, 1e-12));
    CHECK(dice(toks({"x", "y"}), toks({"x", "y"})) == 1.0);
    CHECK(dice({}, {}) == 0.0);
}

TEST_CASE("dice equals 2*jaccard/(1+jaccard) on random sets") {
    std::mt19937 rng(3);
    for (int iter = 0; iter < 1000; ++iter) {
        const auto a = random_tokens(rng, 12, 10);
        const auto b = random_tokens(rng, 12, 10);
        const double j = jaccard(a, b);
        const double d = dice(a, b);
        if (a.empty() && b.empty()) {
            CHECK(d == 0.0);
        } else {
            CHECK_THAT(d, WithinAbs(2.0 * j / (1.0 + j), 1e-12));
        }
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
        CHECK(j >= 0.0);
        CHECK(j <= 1.0);
        CHECK(jaccard(a, b) == jaccard(b, a));
        CHECK(dice(a, b) == dice(b, a));
    }
}

TEST_CASE("dice_bigram uses character bigram counts") {
    // night/nacht share only the "ht" bigram: 2*1/(4+4)
    CHECK_THAT(dice_bigram(toks({"night"}), toks({"nacht"})), WithinAbs(0.25, 1e-12));
    CHECK(dice_bigram(toks({"night"}), toks({"night"})) == 1.0);
    CHECK(dice_bigram({}, {}) == 0.0);
    CHECK(dice_bigram(toks({"a"}), toks({"a"})) == 0.0);  // no bigrams in one-char strings
    CHECK(dice_bigram(toks({"ab", "cd"}), toks({"ab", "cd"})) == 1.0);
}

TEST_CASE("tf_cosine on term frequency vectors") {
    CHECK_THAT(tf_cosine(toks({"a", "a", "b"}), toks({"a", "b", "b"})), WithinAbs(0.8, 1e-12));
    CHECK_THAT(tf_cosine(toks({"a", "b"}), toks({"a", "b"})), WithinAbs(1.0, 1e-12));
    CHECK(tf_cosine(toks({"a"}), toks({"b"})) == 0.0);
    CHECK(tf_cosine({}, toks({"a"})) == 0.0);
}

TEST_CASE("tf_cosine is scale invariant") {
    std::mt19937 rng(5);
    for (int iter = 0; iter < 200; ++iter) {
        const auto a = random_tokens(rng, 8, 6);
        const auto b = random_tokens(rng, 8, 6);
        const double once = tf_cosine(a, b);
        std::vector<Token> a3, b2;
        for (int r = 0; r < 3; ++r) a3.insert(a3.end(), a.begin(), a.end());
        for (int r = 0; r < 2; ++r) b2.insert(b2.end(), b.begin(), b.end());
        CHECK_THAT(tf_cosine(a3, b2), WithinAbs(once, 1e-12));
        CHECK(tf_cosine(a, b) == tf_cosine(b, a));
    }
}

TEST_CASE("idf table counts distinct tokens per document") {
    IdfTable idf;
    idf.add_document(toks({"a", "a", "b"}));
    idf.add_document(toks({"a", "c"}));
    CHECK(idf.doc_count == 2);
    CHECK(idf.df.at("a") == 2);
    CHECK(idf.df.at("b") == 1);
    CHECK_THAT(idf.idf(Token{"a"}), WithinAbs(std::log(3.0 / 3.0) + 1.0, 1e-12));
    CHECK_THAT(idf.idf(Token{"b"}), WithinAbs(std::log(3.0 / 2.0) + 1.0, 1e-12));
    CHECK_THAT(idf.idf(Token{"unseen"}), WithinAbs(std::log(3.0 / 1.0) + 1.0, 1e-12));
}

TEST_CASE("tfidf_cosine identities") {
    IdfTable idf;
    idf.add_document(toks({"a", "b"}));
    idf.add_document(toks({"c"}));
    CHECK_THAT(tfidf_cosine(toks({"a", "b"}), toks({"a", "b"}), idf), WithinAbs(1.0, 1e-12));
    CHECK(tfidf_cosine(toks({"a"}), toks({"c"}), idf) == 0.0);

    // uniform idf cancels out of the cosine
    std::mt19937 rng(9);
    IdfTable uniform;
    uniform.doc_count = 10;
    for (int v = 0; v < 6; ++v) uniform.df["w" + std::to_string(v)] = 4;
    for (int iter = 0; iter < 300; ++iter) {
        const auto a = random_tokens(rng, 8, 6);
        const auto b = random_tokens(rng, 8, 6);
        CHECK_THAT(tfidf_cosine(a, b, uniform), WithinAbs(tf_cosine(a, b), 1e-12));
        CHECK(tfidf_cosine(a, b, uniform) == tfidf_cosine(b, a, uniform));
    }
}

TEST_CASE("feature kind ids parse and format") {
    for (const char* id : {"jaccard", "dice", "dice-bigram", "tf", "tfidf", "combined"}) {
        const FeatureKind kind = FeatureKind::parse(id);
        CHECK(kind.id() == id);
        CHECK_FALSE(kind.root_augmented);
    }
    const FeatureKind root = FeatureKind::parse("root:jaccard:0.1");
    CHECK(root.root_augmented);
    CHECK(root.base == SimilarityKind::jaccard);
    CHECK(root.root_weight == 0.1);
    CHECK(root.id() == "root:jaccard:0.1");
    CHECK(FeatureKind::parse("root:tfidf:0.25").needs_idf());

    CHECK_THROWS_AS(FeatureKind::parse("cosine"), std::invalid_argument);
    CHECK_THROWS_AS(FeatureKind::parse("root:jaccard"), std::invalid_argument);
    CHECK_THROWS_AS(FeatureKind::parse("root:nope:0.1"), std::invalid_argument);
    CHECK_THROWS_AS(FeatureKind::parse("root:jaccard:-1"), std::invalid_argument);
}

TEST_CASE("heuristic parse provider returns a member token") {
    const HeuristicParseProvider parser;
    CHECK_FALSE(parser.root_token({}).has_value());

    const auto verbish = toks({"the", "study", "demonstrated", "effects"});
    const auto root = parser.root_token(verbish);
    REQUIRE(root.has_value());
    CHECK(root->surface == "demonstrated");

    std::mt19937 rng(13);
    for (int iter = 0; iter < 200; ++iter) {
        const auto sentence = random_tokens(rng, 9, 30);
        const auto r = parser.root_token(sentence);
        if (sentence.empty()) {
            CHECK_FALSE(r.has_value());
        } else {
            REQUIRE(r.has_value());
            CHECK(std::find(sentence.begin(), sentence.end(), *r) != sentence.end());
        }
    }
}

TEST_CASE("score_pool shapes and kinds") {
    Question q;
    q.id = "q";
    q.qtype = QuestionType::summary;
    q.body = "alpha beta gamma";
    q.ideal_answers = {"alpha"};

    std::vector<Sentence> pool;
    for (const char* raw : {"alpha beta gamma", "alpha beta", "unrelated words here", "beta gamma delta",
                            "alpha beta gamma"}) {
        Sentence s;
        s.raw = raw;
        s.tokens = tokenize(raw);
        pool.push_back(s);
    }

    const auto combined = score_pool(q, pool, FeatureKind::parse("combined"));
    REQUIRE(combined.size() == 5);
    CHECK_THAT(combined[0].score, WithinAbs(3.0, 1e-12));  // identical pair: jaccard+dice+tf all 1
    CHECK(combined[2].score == 0.0);
    for (const auto& sc : combined) {
        CHECK(sc.score >= 0.0);
        CHECK(sc.score <= 3.0);
    }
    // order preserved
    CHECK(combined[3].sentence.raw == "beta gamma delta");

    // repeated calls are bit-identical
    const auto again = score_pool(q, pool, FeatureKind::parse("combined"));
    for (std::size_t i = 0; i < again.size(); ++i) CHECK(again[i].score == combined[i].score);

    CHECK_THROWS_AS(score_pool(q, pool, FeatureKind::parse("tfidf")), std::invalid_argument);
    CHECK_THROWS_AS(score_pool(q, pool, FeatureKind::parse("root:jaccard:0.1")), std::invalid_argument);
}

TEST_CASE("root augmentation adds the bonus on matching roots") {
    Question q;
    q.id = "q";
    q.body = "The study demonstrated alpha effects";

    std::vector<Sentence> pool;
    Sentence match;
    match.raw = "Results demonstrated beta and alpha";
    match.tokens = tokenize(match.raw);
    Sentence nomatch;
    nomatch.raw = "alpha was implicated in gamma";
    nomatch.tokens = tokenize(nomatch.raw);
    pool = {match, nomatch};

    const HeuristicParseProvider parser;
    const auto plain = score_pool(q, pool, FeatureKind::parse("jaccard"));
    const auto boosted = score_pool(q, pool, FeatureKind::parse("root:jaccard:0.1"), nullptr, &parser);
    // both roots resolve to "demonstrated"
    CHECK_THAT(boosted[0].score, WithinAbs(plain[0].score + 0.1, 1e-12));
    // "implicated" vs "demonstrated": no bonus
    CHECK_THAT(boosted[1].score, WithinAbs(plain[1].score, 1e-12));
}

TEST_CASE("score_pool applies stopwords to both sides") {
    Question q;
    q.id = "q";
    q.body = "the alpha";
    Sentence s;
    s.raw = "the beta";
    s.tokens = tokenize(s.raw);
    const StopwordSet stop{"the"};
    const auto scored = score_pool(q, {&s, 1}, FeatureKind::parse("jaccard"), nullptr, nullptr, &stop);
    CHECK(scored[0].score == 0.0);  // without stopwords "the" would overlap
    const auto unfiltered = score_pool(q, {&s, 1}, FeatureKind::parse("jaccard"));
    CHECK(unfiltered[0].score > 0.0);
}
