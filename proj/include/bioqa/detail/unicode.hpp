#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>

#include "bioqa/detail/unicode_data.hpp"

namespace bioqa::detail {

inline constexpr char32_t kReplacementChar = 0xFFFD;

// Hangul syllable composition constants (UAX #15).
inline constexpr char32_t kHangulSBase = 0xAC00;
inline constexpr char32_t kHangulLBase = 0x1100;
inline constexpr char32_t kHangulVBase = 0x1161;
inline constexpr char32_t kHangulTBase = 0x11A7;
inline constexpr int kHangulLCount = 19;
inline constexpr int kHangulVCount = 21;
inline constexpr int kHangulTCount = 28;
inline constexpr int kHangulNCount = kHangulVCount * kHangulTCount;
inline constexpr int kHangulSCount = kHangulLCount * kHangulNCount;

// Decodes one UTF-8 sequence starting at s[i]. Advances i past the
// sequence; malformed input yields U+FFFD and advances one byte.
inline char32_t decode_utf8_at(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t j) { return static_cast<unsigned char>(s[j]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return kReplacementChar;
    }
    if (i + len > s.size()) {
        ++i;
        return kReplacementChar;
    }
    for (int j = 1; j < len; ++j) {
        const unsigned char bx = byte(i + j);
        if ((bx & 0xC0) != 0x80) {
            ++i;
            return kReplacementChar;
        }
        cp = (cp << 6) | (bx & 0x3F);
    }
    // Reject overlong forms and surrogates.
    static constexpr char32_t kMinForLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLen[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++i;
        return kReplacementChar;
    }
    i += len;
    return cp;
}

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) out.push_back(decode_utf8_at(s, i));
    return out;
}

inline std::string encode_utf8(const std::u32string& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

inline bool in_ranges(const CpRange* ranges, int n, char32_t cp) {
    const CpRange* end = ranges + n;
    auto it = std::upper_bound(ranges, end, cp, [](char32_t v, const CpRange& r) { return v < r.first; });
    return it != ranges && cp <= (it - 1)->last;
}

inline bool is_letter(char32_t cp) {
    return in_ranges(kLetterRanges, kLetterRanges_size, cp);
}

inline bool is_digit_cp(char32_t cp) {
    return in_ranges(kDigitRanges, kDigitRanges_size, cp);
}

inline char32_t to_lower_cp(char32_t cp) {
    if (cp < 0x80) return (cp >= U'A' && cp <= U'Z') ? cp + 32 : cp;
    const CpMap* end = kLowerMap + kLowerMap_size;
    auto it = std::lower_bound(kLowerMap, end, cp, [](const CpMap& m, char32_t v) { return m.from < v; });
    return (it != end && it->from == cp) ? it->to : cp;
}

inline std::uint8_t combining_class(char32_t cp) {
    if (cp < 0x300) return 0;
    const CpClass* end = kCombiningClass + kCombiningClass_size;
    auto it = std::lower_bound(kCombiningClass, end, cp, [](const CpClass& c, char32_t v) { return c.cp < v; });
    return (it != end && it->cp == cp) ? it->ccc : 0;
}

inline const Decomp* find_decomp(char32_t cp) {
    const Decomp* end = kCanonicalDecomp + kCanonicalDecomp_size;
    auto it = std::lower_bound(kCanonicalDecomp, end, cp, [](const Decomp& d, char32_t v) { return d.cp < v; });
    return (it != end && it->cp == cp) ? it : nullptr;
}

inline char32_t compose_pair(char32_t a, char32_t b) {
    // Hangul LV and LVT composition is algorithmic.
    if (a >= kHangulLBase && a < kHangulLBase + kHangulLCount && b >= kHangulVBase &&
        b < kHangulVBase + kHangulVCount) {
        return kHangulSBase + ((a - kHangulLBase) * kHangulVCount + (b - kHangulVBase)) * kHangulTCount;
    }
    if (a >= kHangulSBase && a < kHangulSBase + kHangulSCount && (a - kHangulSBase) % kHangulTCount == 0 &&
        b > kHangulTBase && b < kHangulTBase + kHangulTCount) {
        return a + (b - kHangulTBase);
    }
    const Composite* end = kComposites + kComposites_size;
    auto it = std::lower_bound(kComposites, end, a, [](const Composite& c, char32_t v) { return c.first < v; });
    for (; it != end && it->first == a; ++it) {
        if (it->second == b) return it->composed;
    }
    return 0;
}

inline void decompose_into(char32_t cp, std::u32string& out) {
    if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
        const char32_t s = cp - kHangulSBase;
        out.push_back(kHangulLBase + s / kHangulNCount);
        out.push_back(kHangulVBase + (s % kHangulNCount) / kHangulTCount);
        if (s % kHangulTCount != 0) out.push_back(kHangulTBase + s % kHangulTCount);
        return;
    }
    if (const Decomp* d = find_decomp(cp)) {
        decompose_into(d->first, out);
        if (d->second != 0) decompose_into(d->second, out);
        return;
    }
    out.push_back(cp);
}

// Canonical ordering: stable sort of nonzero-ccc runs (bubble passes keep
// equal classes in input order).
inline void canonical_order(std::u32string& cps) {
    for (std::size_t i = 1; i < cps.size(); ++i) {
        const std::uint8_t cc = combining_class(cps[i]);
        if (cc == 0) continue;
        std::size_t j = i;
        while (j > 0 && combining_class(cps[j - 1]) > cc) {
            std::swap(cps[j - 1], cps[j]);
            --j;
        }
    }
}

inline std::u32string compose_canonical(const std::u32string& src) {
    std::u32string out;
    out.reserve(src.size());
    std::ptrdiff_t last_starter = -1;
    for (char32_t cp : src) {
        const std::uint8_t cc = combining_class(cp);
        if (last_starter >= 0) {
            const std::uint8_t prev_cc =
                (static_cast<std::size_t>(last_starter) == out.size() - 1) ? 0 : combining_class(out.back());
            if (prev_cc == 0 || prev_cc < cc) {
                if (char32_t composed = compose_pair(out[last_starter], cp)) {
                    out[last_starter] = composed;
                    continue;
                }
            }
        }
        out.push_back(cp);
        if (cc == 0) last_starter = static_cast<std::ptrdiff_t>(out.size()) - 1;
    }
    return out;
}

// Unicode NFC over UTF-8 bytes. Invalid sequences are replaced with U+FFFD.
inline std::string nfc(std::string_view utf8) {
    // ASCII fast path: already NFC.
    if (std::all_of(utf8.begin(), utf8.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; })) {
        return std::string(utf8);
    }
    std::u32string decomposed;
    decomposed.reserve(utf8.size());
    std::size_t i = 0;
    while (i < utf8.size()) decompose_into(decode_utf8_at(utf8, i), decomposed);
    canonical_order(decomposed);
    return encode_utf8(compose_canonical(decomposed));
}

}  // namespace bioqa::detail
