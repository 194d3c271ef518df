#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "bioqa/detail/unicode.hpp"

namespace bioqa {

/// A normalized word unit: lowercased, NFC, made of letters/digits/hyphens.
struct Token {
    std::string surface;

    friend bool operator==(const Token&, const Token&) = default;
    friend auto operator<=>(const Token&, const Token&) = default;
};

using StopwordSet = std::unordered_set<std::string>;

/// A candidate sentence. `raw` is the original span from the snippet it was
/// cut from; `tokens` is always tokenize(raw).
struct Sentence {
    std::string raw;
    std::vector<Token> tokens;
    std::size_t source_snippet = 0;
};

namespace detail {

inline bool is_token_char(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') || (cp >= U'0' && cp <= U'9') ||
               cp == U'-';
    }
    return is_letter(cp) || is_digit_cp(cp);
}

}  // namespace detail

/// Lowercases and splits `text` on runs of characters outside
/// letters/digits/hyphen. Input is NFC-normalized first. Empty pieces are
/// dropped; stopwords, when a set is given, are removed afterward.
inline std::vector<Token> tokenize(std::string_view text, const StopwordSet* stopwords = nullptr) {
    const std::string norm = detail::nfc(text);
    std::vector<Token> out;
    std::string current;
    std::size_t i = 0;
    auto flush = [&] {
        if (current.empty()) return;
        if (!stopwords || !stopwords->contains(current)) out.push_back(Token{current});
        current.clear();
    };
    while (i < norm.size()) {
        const char32_t cp = detail::decode_utf8_at(norm, i);
        if (detail::is_token_char(cp)) {
            detail::append_utf8(current, detail::to_lower_cp(cp));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

inline std::string join_tokens(std::span<const Token> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i].surface;
    }
    return out;
}

/// Abbreviations that suppress a sentence break at a following period.
/// Entries are matched case-insensitively against the text ending at the
/// period, with a word boundary required in front.
struct SentenceSplitOptions {
    std::vector<std::string> abbreviations{"e.g", "i.e", "Fig", "et al", "vs"};
};

namespace detail {

inline bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// True when the code point at byte offset `pos` can open a sentence:
// a digit or an uppercase letter.
inline bool is_sentence_opener(std::string_view s, std::size_t pos) {
    std::size_t i = pos;
    const char32_t cp = decode_utf8_at(s, i);
    if (cp >= U'0' && cp <= U'9') return true;
    return is_letter(cp) && to_lower_cp(cp) != cp;
}

inline bool ends_with_abbreviation(std::string_view text, const std::vector<std::string>& abbreviations) {
    auto lower_eq = [](char a, char b) {
        auto lo = [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; };
        return lo(a) == lo(b);
    };
    for (const std::string& abbr : abbreviations) {
        if (abbr.empty() || text.size() < abbr.size()) continue;
        const std::string_view tail = text.substr(text.size() - abbr.size());
        if (!std::equal(tail.begin(), tail.end(), abbr.begin(), lower_eq)) continue;
        if (text.size() > abbr.size()) {
            const char before = text[text.size() - abbr.size() - 1];
            const bool alnum = (before >= 'a' && before <= 'z') || (before >= 'A' && before <= 'Z') ||
                               (before >= '0' && before <= '9');
            if (alnum) continue;
        }
        return true;
    }
    return false;
}

}  // namespace detail

/// Splits a snippet into sentences on '.', '?' or '!' followed by whitespace
/// and an uppercase letter or digit. Periods ending an abbreviation from the
/// guard list do not break. Raw spans cover every non-separator character of
/// the input, in order.
inline std::vector<Sentence> split_sentences(std::string_view snippet, std::size_t snippet_index = 0,
                                             const SentenceSplitOptions& opts = {}) {
    std::vector<Sentence> out;
    std::size_t start = 0;
    auto emit = [&](std::size_t begin, std::size_t end) {
        while (begin < end && detail::is_ascii_space(snippet[begin])) ++begin;
        while (end > begin && detail::is_ascii_space(snippet[end - 1])) --end;
        if (begin >= end) return;
        Sentence s;
        s.raw = std::string(snippet.substr(begin, end - begin));
        s.tokens = tokenize(s.raw);
        s.source_snippet = snippet_index;
        out.push_back(std::move(s));
    };
    for (std::size_t i = 0; i < snippet.size(); ++i) {
        const char c = snippet[i];
        if (c != '.' && c != '?' && c != '!') continue;
        std::size_t j = i + 1;
        while (j < snippet.size() && detail::is_ascii_space(snippet[j])) ++j;
        if (j == i + 1 || j == snippet.size()) continue;  // no whitespace or nothing follows
        if (!detail::is_sentence_opener(snippet, j)) continue;
        if (c == '.' && detail::ends_with_abbreviation(snippet.substr(start, i - start), opts.abbreviations))
            continue;
        emit(start, i + 1);
        start = j;
        i = j - 1;
    }
    emit(start, snippet.size());
    return out;
}

/// Reads one stopword per line, UTF-8; words are normalized the way
/// tokenize() normalizes, so lookups match token surfaces.
inline StopwordSet load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stopword file: " + path.string());
    StopwordSet words;
    std::string line;
    while (std::getline(in, line)) {
        for (const Token& t : tokenize(line)) words.insert(t.surface);
    }
    return words;
}

}  // namespace bioqa

template <>
struct std::hash<bioqa::Token> {
    std::size_t operator()(const bioqa::Token& t) const noexcept {
        return std::hash<std::string>{}(t.surface);
    }
};
