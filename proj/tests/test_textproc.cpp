#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "bioqa/textproc.hpp"

using namespace bioqa;

namespace {

std::vector<std::string> surfaces(const std::vector<Token>& tokens) {
    std::vector<std::string> out;
    for (const Token& t : tokens) out.push_back(t.surface);
    return out;
}

}  // namespace

TEST_CASE("tokenize lowercases and splits on punctuation") {
    CHECK(surfaces(tokenize("The cat, the CAT!")) == std::vector<std::string>{"the", "cat", "the", "cat"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("   \t\n ").empty());
    CHECK(surfaces(tokenize("a,b;;c")) == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("tokenize keeps hyphens inside tokens") {
    CHECK(surfaces(tokenize("5-azacytidine")) == std::vector<std::string>{"5-azacytidine"});
    CHECK(surfaces(tokenize("2-(1H)-pyrimidinone riboside")) ==
          std::vector<std::string>{"2-", "1h", "-pyrimidinone", "riboside"});
}

TEST_CASE("tokenize removes stopwords after splitting") {
    StopwordSet stop{"vaccine"};
    CHECK(surfaces(tokenize("GV1001 vaccine", &stop)) == std::vector<std::string>{"gv1001"});
    // stopword matching happens on the normalized surface
    StopwordSet the_stop{"the"};
    CHECK(surfaces(tokenize("The cat, the CAT!", &the_stop)) == std::vector<std::string>{"cat", "cat"});
}

TEST_CASE("tokenize normalizes to NFC and handles non-ASCII letters") {
    // decomposed c + combining cedilla vs precomposed form
    CHECK(tokenize("Behçet") == tokenize("Behçet"));
    CHECK(surfaces(tokenize("Behçet")) == std::vector<std::string>{"behçet"});
    // angstrom sign normalizes to A-ring, then lowercases
    CHECK(surfaces(tokenize("Å")) == std::vector<std::string>{"å"});
    CHECK(surfaces(tokenize("naïve NAÏVE")) ==
          std::vector<std::string>{"naïve", "naïve"});
    // non-letter punctuation beyond ASCII splits tokens
    CHECK(surfaces(tokenize("alpha—beta")) == std::vector<std::string>{"alpha", "beta"});
}

TEST_CASE("nfc matches reference vectors") {
    using detail::nfc;
    CHECK(nfc("é") == "é");
    CHECK(nfc("é") == "é");
    CHECK(nfc("Å") == "Å");
    CHECK(nfc("ṩ") == "ṩ");
    CHECK(nfc("q̣̇") == "q̣̇");  // reorder only, no composite exists
    CHECK(nfc("각") == "각");    // hangul jamo compose
    CHECK(nfc("ﬁ") == "ﬁ");                // compatibility ligature untouched
}

TEST_CASE("tokenize is idempotent on its own joined output") {
    std::mt19937 rng(7);
    const std::string alphabet = "abC -?.!93,;é";
    for (int iter = 0; iter < 200; ++iter) {
        std::string text;
        const std::size_t len = rng() % 40;
        for (std::size_t i = 0; i < len; ++i) text.push_back(alphabet[rng() % alphabet.size()]);
        const auto once = tokenize(text);
        CHECK(tokenize(join_tokens(once)) == once);
    }
}

TEST_CASE("split_sentences basic boundaries") {
    auto sents = split_sentences("Mfn2 binds parkin. It is required.");
    REQUIRE(sents.size() == 2);
    CHECK(sents[0].raw == "Mfn2 binds parkin.");
    CHECK(sents[1].raw == "It is required.");

    CHECK(split_sentences("See Fig. 2 for details.").size() == 1);
    CHECK(split_sentences("").empty());
    CHECK(split_sentences("    ").empty());
    CHECK(split_sentences("no terminator at all").size() == 1);
}

TEST_CASE("split_sentences abbreviation guard") {
    CHECK(split_sentences("Results differ, e.g. 5-fold changes were seen.").size() == 1);
    CHECK(split_sentences("Smith et al. 2019 reported this.").size() == 1);
    CHECK(split_sentences("The trial (vs. Placebo) succeeded.").size() == 1);
    // guard requires a word boundary: "xFig." is not the abbreviation "Fig"
    CHECK(split_sentences("See xFig. 2 for details.").size() == 2);
    // custom abbreviation list
    SentenceSplitOptions opts;
    opts.abbreviations = {"approx"};
    CHECK(split_sentences("It rose approx. 2 fold. Then it fell.", 0, opts).size() == 2);
}

TEST_CASE("split_sentences requires whitespace plus an opener") {
    CHECK(split_sentences("pH 7.4 was stable").size() == 1);           // no whitespace after '.'
    CHECK(split_sentences("it stopped. then resumed").size() == 1);    // lowercase continuation
    CHECK(split_sentences("Dose was 5 mg. 10 mg was next.").size() == 2);  // digit opener
    CHECK(split_sentences("Was it real? Yes.").size() == 2);
    CHECK(split_sentences("Stop! Go.").size() == 2);
}

TEST_CASE("split_sentences keeps raw spans and snippet index") {
    const std::string snippet = "  First part is here. Second part follows!  ";
    const auto sents = split_sentences(snippet, 3);
    REQUIRE(sents.size() == 2);
    CHECK(sents[0].raw == "First part is here.");
    CHECK(sents[1].raw == "Second part follows!");
    for (const Sentence& s : sents) {
        CHECK(s.source_snippet == 3);
        CHECK(s.tokens == tokenize(s.raw));
        CHECK(snippet.find(s.raw) != std::string::npos);
    }
}

TEST_CASE("split_sentences covers every character with sentences or separators") {
    std::mt19937 rng(11);
    const std::vector<std::string> pieces = {"Alpha beta.",  "It works!",   "See Fig. 3.",
                                             "Was it so?",   "e.g. here",   "Final bit"};
    for (int iter = 0; iter < 100; ++iter) {
        std::string snippet;
        const std::size_t n = 1 + rng() % 4;
        for (std::size_t i = 0; i < n; ++i) {
            snippet += pieces[rng() % pieces.size()];
            snippet += (rng() % 2) ? " " : "  ";
        }
        const auto sents = split_sentences(snippet);
        std::size_t cursor = 0;
        for (const Sentence& s : sents) {
            REQUIRE(!s.raw.empty());
            const std::size_t at = snippet.find(s.raw, cursor);
            REQUIRE(at != std::string::npos);
            for (std::size_t i = cursor; i < at; ++i) CHECK(detail::is_ascii_space(snippet[i]));
            cursor = at + s.raw.size();
        }
        for (std::size_t i = cursor; i < snippet.size(); ++i) CHECK(detail::is_ascii_space(snippet[i]));
    }
}

TEST_CASE("tokenize and split_sentences are deterministic") {
    const std::string text = "The GV1001 vaccine targets hTERT. It is a 16-amino acid peptide!";
    CHECK(tokenize(text) == tokenize(text));
    const auto a = split_sentences(text);
    const auto b = split_sentences(text);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].raw == b[i].raw);
        CHECK(a[i].tokens == b[i].tokens);
    }
}
