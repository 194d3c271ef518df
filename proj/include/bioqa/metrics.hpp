#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bioqa/corpus.hpp"
#include "bioqa/textproc.hpp"

namespace bioqa {

struct RougeL {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Longest common subsequence length, standard O(|x|*|y|) dynamic program.
inline std::size_t lcs_length(std::span<const Token> x, std::span<const Token> y) {
    if (x.empty() || y.empty()) return 0;
    std::vector<std::size_t> prev(y.size() + 1, 0);
    std::vector<std::size_t> row(y.size() + 1, 0);
    for (std::size_t i = 1; i <= x.size(); ++i) {
        for (std::size_t j = 1; j <= y.size(); ++j) {
            row[j] = (x[i - 1] == y[j - 1]) ? prev[j - 1] + 1 : std::max(prev[j], row[j - 1]);
        }
        std::swap(prev, row);
    }
    return prev[y.size()];
}

/// ROUGE-L of a prediction against one reference: recall = LCS/|ref|,
/// precision = LCS/|pred|, F1 the harmonic mean (0 whenever a denominator
/// vanishes).
inline RougeL rouge_l(std::string_view reference, std::string_view prediction) {
    const std::vector<Token> ref = tokenize(reference);
    const std::vector<Token> pred = tokenize(prediction);
    const double lcs = static_cast<double>(lcs_length(ref, pred));
    RougeL r;
    r.recall = ref.empty() ? 0.0 : lcs / static_cast<double>(ref.size());
    r.precision = pred.empty() ? 0.0 : lcs / static_cast<double>(pred.size());
    r.f1 = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

/// Multi-reference ROUGE-L: the max-F1 triple over the references.
inline RougeL rouge_l_best(std::span<const std::string> references, std::string_view prediction) {
    RougeL best;
    bool first = true;
    for (const std::string& reference : references) {
        const RougeL r = rouge_l(reference, prediction);
        if (first || r.f1 > best.f1) {
            best = r;
            first = false;
        }
    }
    return best;
}

namespace detail {

inline bool contains_token_seq(std::span<const Token> haystack, std::span<const Token> needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        if (std::equal(needle.begin(), needle.end(), haystack.begin() + i)) return true;
    }
    return false;
}

}  // namespace detail

struct MatchResult {
    bool soft_hit = false;
    bool hard_hit = false;
};

/// Exact-answer containment under normalized token-boundary matching: a
/// synonym matches when its full token sequence occurs contiguously in the
/// prediction's tokens. soft = at least one group matched, hard = all
/// groups matched.
inline MatchResult exact_match(std::string_view prediction, const ExactAnswer& exact) {
    if (exact.groups.empty())
        throw std::invalid_argument("exact_match: no exact answer (summary question?)");
    const std::vector<Token> pred = tokenize(prediction);
    std::size_t matched = 0;
    for (const auto& group : exact.groups) {
        const bool hit = std::any_of(group.begin(), group.end(), [&](const std::string& synonym) {
            const std::vector<Token> needle = tokenize(synonym);
            return detail::contains_token_seq(pred, needle);
        });
        if (hit) ++matched;
    }
    return MatchResult{matched >= 1, matched == exact.groups.size()};
}

/// One evaluated (question, feature, selector, k) cell. Exact-answer hits
/// are absent for summary questions.
struct QuestionScore {
    std::string qid;
    QuestionType qtype = QuestionType::summary;
    std::string feature;
    std::string selector;
    std::size_t k = 0;
    RougeL rouge;
    std::optional<bool> soft_hit;
    std::optional<bool> hard_hit;
};

struct AccuracyPair {
    double soft = 0.0;
    double hard = 0.0;
    std::size_t n_questions = 0;
};

/// Mean soft/hard hit rates over rows that carry exact-answer results.
inline AccuracyPair aggregate_accuracy(std::span<const QuestionScore> rows) {
    if (rows.empty()) throw std::invalid_argument("aggregate_accuracy: no rows");
    AccuracyPair acc;
    for (const QuestionScore& row : rows) {
        if (!row.soft_hit || !row.hard_hit)
            throw std::invalid_argument("aggregate_accuracy: row without exact-answer hits (qid " + row.qid +
                                        ")");
        acc.soft += *row.soft_hit ? 1.0 : 0.0;
        acc.hard += *row.hard_hit ? 1.0 : 0.0;
    }
    acc.n_questions = rows.size();
    acc.soft /= static_cast<double>(rows.size());
    acc.hard /= static_cast<double>(rows.size());
    return acc;
}

}  // namespace bioqa
