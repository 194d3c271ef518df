#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bioqa/selection.hpp"
#include "bioqa/textproc.hpp"

namespace bioqa {

/// Final predicted answer. `truncated` marks that the word budget cut at
/// least one selected sentence.
struct AnswerText {
    std::string text;
    std::size_t word_count = 0;
    bool truncated = false;
};

namespace detail {

inline std::size_t whitespace_word_count(std::string_view text) {
    std::size_t count = 0;
    bool in_word = false;
    for (char c : text) {
        const bool space = is_ascii_space(c);
        if (!space && !in_word) ++count;
        in_word = !space;
    }
    return count;
}

}  // namespace detail

/// Joins the selected sentences' raw texts with single spaces, in selection
/// order. With a budget, whole sentences are appended while the running word
/// count stays within it; the first sentence is always emitted even when it
/// alone exceeds the budget. Never cuts inside a sentence.
inline AnswerText tile(const Selection& selection, std::span<const Sentence> pool,
                       std::optional<std::size_t> word_budget = std::nullopt) {
    if (selection.chosen.empty()) throw std::invalid_argument("tile: empty selection");
    if (word_budget && *word_budget == 0) throw std::invalid_argument("tile: word budget must be positive");
    AnswerText answer;
    for (std::size_t pick = 0; pick < selection.chosen.size(); ++pick) {
        const std::size_t index = selection.chosen[pick];
        if (index >= pool.size()) throw std::out_of_range("tile: selection index out of pool range");
        const Sentence& sentence = pool[index];
        const std::size_t words = detail::whitespace_word_count(sentence.raw);
        if (word_budget && pick > 0 && answer.word_count + words > *word_budget) {
            answer.truncated = true;
            break;
        }
        if (pick > 0) answer.text.push_back(' ');
        answer.text += sentence.raw;
        answer.word_count += words;
    }
    return answer;
}

}  // namespace bioqa
