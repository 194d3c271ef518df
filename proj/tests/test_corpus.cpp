#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "bioqa/corpus.hpp"

using namespace bioqa;
using nlohmann::json;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

Question make_question(std::string id, QuestionType qtype) {
    Question q;
    q.id = std::move(id);
    q.qtype = qtype;
    q.body = "What does GV1001 target?";
    q.snippets = {"GV1001 targets hTERT. It is a peptide vaccine."};
    q.ideal_answers = {"GV1001 targets human telomerase reverse transcriptase."};
    switch (qtype) {
        case QuestionType::summary: break;
        case QuestionType::yesno: q.exact.groups = {{"yes"}}; break;
        case QuestionType::factoid: q.exact.groups = {{"htert", "telomerase"}}; break;
        case QuestionType::list: q.exact.groups = {{"a"}, {"b", "b2"}}; break;
    }
    return q;
}

}  // namespace

TEST_CASE("load_dataset parses the BioASQ shapes") {
    const std::string body = R"({"questions": [
      {"id": "q1", "type": "yesno", "body": "Is A a B?",
       "snippets": [{"text": "A is a B. It binds C."}, "Bare snippet text."],
       "ideal_answer": "Yes, A is a B.", "exact_answer": "Yes"},
      {"id": "q2", "type": "factoid", "body": "What is A?",
       "snippets": [{"text": "A is a kinase."}],
       "ideal_answer": ["A is a kinase.", "A kinase."], "exact_answer": [["kinase", "a kinase"]]},
      {"id": "q3", "type": "list", "body": "Which drugs inhibit A?",
       "snippets": [{"text": "X and Y inhibit A."}],
       "ideal_answer": ["X and Y."], "exact_answer": [["X"], ["Y", "why"]]},
      {"id": "q4", "type": "summary", "body": "Summarize A.",
       "snippets": [{"text": "A does things."}], "ideal_answer": ["A does things."]},
      {"id": "bad1", "type": "yesno", "body": "Broken?", "ideal_answer": "yes",
       "exact_answer": "maybe"},
      {"id": "bad2", "type": "factoid", "body": "", "ideal_answer": "x", "exact_answer": "x"}
    ]})";
    const auto path = write_temp("bioqa_corpus_shapes.json", body);
    std::vector<std::string> warnings;
    const auto questions = load_dataset(path, &warnings);
    REQUIRE(questions.size() == 4);
    CHECK(warnings.size() == 2);

    CHECK(questions[0].qtype == QuestionType::yesno);
    CHECK(questions[0].exact.groups == std::vector<std::vector<std::string>>{{"yes"}});
    CHECK(questions[0].snippets.size() == 2);
    CHECK(questions[0].snippets[1] == "Bare snippet text.");

    CHECK(questions[1].exact.groups == std::vector<std::vector<std::string>>{{"kinase", "a kinase"}});
    CHECK(questions[1].ideal_answers.size() == 2);

    CHECK(questions[2].exact.groups == std::vector<std::vector<std::string>>{{"X"}, {"Y", "why"}});

    CHECK(questions[3].qtype == QuestionType::summary);
    CHECK(questions[3].exact.groups.empty());
}

TEST_CASE("load_dataset failure modes") {
    CHECK_THROWS_AS(load_dataset("/nonexistent/path.json"), std::runtime_error);
    const auto bad = write_temp("bioqa_corpus_bad.json", "{not json");
    CHECK_THROWS_WITH(load_dataset(bad), Catch::Matchers::ContainsSubstring("malformed JSON"));
    const auto empty = write_temp("bioqa_corpus_empty.json", R"({"questions": []})");
    CHECK_THROWS_WITH(load_dataset(empty), Catch::Matchers::ContainsSubstring("zero valid questions"));
    const auto nokey = write_temp("bioqa_corpus_nokey.json", R"({"items": []})");
    CHECK_THROWS_WITH(load_dataset(nokey), Catch::Matchers::ContainsSubstring("questions"));
}

TEST_CASE("question json round-trip is identity") {
    for (const QuestionType qtype :
         {QuestionType::summary, QuestionType::yesno, QuestionType::factoid, QuestionType::list}) {
        const Question q = make_question("rt-" + std::string(to_string(qtype)), qtype);
        std::string error;
        const auto back = question_from_json(to_json(q), error);
        REQUIRE(back.has_value());
        CHECK(error.empty());
        CHECK(*back == q);
    }
}

TEST_CASE("split_dataset reproduces the 7:2:1 sizes") {
    std::vector<Question> questions;
    for (int i = 0; i < 1799; ++i) questions.push_back(make_question("q" + std::to_string(i), QuestionType::summary));
    const DatasetSplit split = split_dataset(questions, 42);
    CHECK(split.train.size() == 1259);
    CHECK(split.dev.size() == 359);
    CHECK(split.test.size() == 181);

    questions.resize(10);
    const DatasetSplit small = split_dataset(questions, 42);
    CHECK(small.train.size() == 7);
    CHECK(small.dev.size() == 2);
    CHECK(small.test.size() == 1);

    questions.resize(9);
    CHECK_THROWS_AS(split_dataset(questions, 42), std::invalid_argument);
}

TEST_CASE("split_dataset is a seeded partition") {
    std::vector<Question> questions;
    for (int i = 0; i < 137; ++i) questions.push_back(make_question("q" + std::to_string(i), QuestionType::yesno));

    const DatasetSplit a = split_dataset(questions, 7);
    const DatasetSplit b = split_dataset(questions, 7);
    auto ids = [](const std::vector<Question>& qs) {
        std::vector<std::string> out;
        for (const auto& q : qs) out.push_back(q.id);
        return out;
    };
    CHECK(ids(a.train) == ids(b.train));
    CHECK(ids(a.dev) == ids(b.dev));
    CHECK(ids(a.test) == ids(b.test));

    // bounds from the floor-floor-remainder rule
    const double n = 137.0;
    CHECK(a.train.size() / n <= 0.7);
    CHECK(a.train.size() / n >= 0.7 - 1.0 / n);
    CHECK(a.dev.size() / n <= 0.2);
    CHECK(a.dev.size() / n >= 0.2 - 1.0 / n);
    CHECK(a.train.size() + a.dev.size() + a.test.size() == questions.size());

    // disjoint and union-complete
    std::set<std::string> seen;
    for (const auto* part : {&a.train, &a.dev, &a.test}) {
        for (const auto& q : *part) CHECK(seen.insert(q.id).second);
    }
    CHECK(seen.size() == questions.size());

    const DatasetSplit c = split_dataset(questions, 8);
    CHECK(ids(a.train) != ids(c.train));
}

TEST_CASE("candidate_pool concatenates in snippet order and dedups") {
    Question q = make_question("p1", QuestionType::summary);
    q.snippets = {"First one. Second one.", "Third one. Fourth one."};
    const auto pool = candidate_pool(q);
    REQUIRE(pool.size() == 4);
    CHECK(pool[0].raw == "First one.");
    CHECK(pool[0].source_snippet == 0);
    CHECK(pool[3].raw == "Fourth one.");
    CHECK(pool[3].source_snippet == 1);

    q.snippets = {"Same text here.", "Same text here.", "Other text here."};
    const auto deduped = candidate_pool(q);
    REQUIRE(deduped.size() == 2);
    CHECK(deduped[0].raw == "Same text here.");
    CHECK(deduped[1].raw == "Other text here.");

    q.snippets = {"   ", "\t"};
    CHECK_THROWS_WITH(candidate_pool(q), Catch::Matchers::ContainsSubstring("empty candidate pool"));
}

TEST_CASE("split manifest lists ids per partition") {
    std::vector<Question> questions;
    for (int i = 0; i < 20; ++i) questions.push_back(make_question("q" + std::to_string(i), QuestionType::list));
    const DatasetSplit split = split_dataset(questions, 3);
    const json manifest = split_manifest(split);
    CHECK(manifest["seed"] == 3);
    CHECK(manifest["train"].size() == 14);
    CHECK(manifest["dev"].size() == 4);
    CHECK(manifest["test"].size() == 2);
}
