#!/usr/bin/env python3
"""Regenerates include/bioqa/detail/unicode_data.hpp from Python's unicodedata.

Emits the tables needed for NFC normalization, simple lowercasing and
letter/digit classification: merged category ranges, nonzero combining
classes, canonical decompositions (Hangul excluded, handled
algorithmically) and primary composite pairs.
"""

import sys
import unicodedata

MAX_CP = 0x110000
HANGUL_S_BASE = 0xAC00
HANGUL_S_COUNT = 11172


def in_hangul_block(cp: int) -> bool:
    return HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT


def category_ranges(prefixes):
    ranges = []
    start = None
    for cp in range(MAX_CP):
        cat = unicodedata.category(chr(cp))
        hit = any(cat.startswith(p) for p in prefixes)
        if hit and start is None:
            start = cp
        elif not hit and start is not None:
            ranges.append((start, cp - 1))
            start = None
    if start is not None:
        ranges.append((start, MAX_CP - 1))
    return ranges


def canonical_decomp(cp: int):
    d = unicodedata.decomposition(chr(cp))
    if not d or d.startswith("<"):
        return None
    parts = [int(p, 16) for p in d.split()]
    if len(parts) == 1:
        return (parts[0], 0)
    assert len(parts) == 2, hex(cp)
    return (parts[0], parts[1])


def main(out_path: str) -> None:
    letters = category_ranges(("L", "M"))
    digits = category_ranges(("N",))

    lower = []
    for cp in range(MAX_CP):
        lo = chr(cp).lower()
        if len(lo) == 1 and ord(lo) != cp:
            lower.append((cp, ord(lo)))

    ccc = []
    for cp in range(MAX_CP):
        c = unicodedata.combining(chr(cp))
        if c != 0:
            ccc.append((cp, c))

    decomp = []
    for cp in range(MAX_CP):
        if in_hangul_block(cp):
            continue
        d = canonical_decomp(cp)
        if d is not None:
            decomp.append((cp, d[0], d[1]))

    composites = []
    for cp, a, b in decomp:
        if b == 0:
            continue
        if unicodedata.normalize("NFC", chr(a) + chr(b)) == chr(cp):
            composites.append((a, b, cp))
    composites.sort()

    with open(out_path, "w") as f:
        w = f.write
        w("// Generated by tools/gen_unicode_data.py (Unicode data via Python %s,\n"
          "// unidata %s). Do not edit by hand.\n"
          % (sys.version.split()[0], unicodedata.unidata_version))
        w("#pragma once\n\n#include <cstdint>\n\nnamespace bioqa::detail {\n\n")

        w("struct CpRange { char32_t first; char32_t last; };\n")
        w("struct CpMap { char32_t from; char32_t to; };\n")
        w("struct CpClass { char32_t cp; std::uint8_t ccc; };\n")
        w("struct Decomp { char32_t cp; char32_t first; char32_t second; };\n")
        w("struct Composite { char32_t first; char32_t second; char32_t composed; };\n\n")

        def emit(name, type_, rows, fmt):
            w("inline constexpr %s %s[] = {\n" % (type_, name))
            for i in range(0, len(rows), 6):
                w("    " + " ".join(fmt % r for r in rows[i:i + 6]) + "\n")
            w("};\n")
            w("inline constexpr int %s_size = %d;\n\n" % (name, len(rows)))

        emit("kLetterRanges", "CpRange", letters, "{0x%X, 0x%X},")
        emit("kDigitRanges", "CpRange", digits, "{0x%X, 0x%X},")
        emit("kLowerMap", "CpMap", lower, "{0x%X, 0x%X},")
        emit("kCombiningClass", "CpClass", ccc, "{0x%X, %d},")
        emit("kCanonicalDecomp", "Decomp", decomp, "{0x%X, 0x%X, 0x%X},")
        emit("kComposites", "Composite", composites, "{0x%X, 0x%X, 0x%X},")

        w("} // namespace bioqa::detail\n")

    print("letters=%d digits=%d lower=%d ccc=%d decomp=%d composites=%d"
          % (len(letters), len(digits), len(lower), len(ccc), len(decomp),
             len(composites)))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "unicode_data.hpp")
