#!/usr/bin/env python3
"""Regenerates src/unicode_tables.inc from Python's unicodedata.

The tables drive the NFC normalizer in src/unicode.cpp:
  - canonical combining classes (nonzero entries only)
  - fully expanded canonical decompositions (Hangul excluded, it is algorithmic)
  - primary composition pairs (derived by checking NFC of each decomposed pair,
    which bakes in the composition exclusions)

Run from the repo root:  python3 scripts/gen_unicode_tables.py
"""

import sys
import unicodedata

MAX_CP = 0x110000
HANGUL_S_BASE = 0xAC00
HANGUL_S_COUNT = 11172


def is_hangul_syllable(cp: int) -> bool:
    return HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT


def canonical_raw(cp: int):
    """Single-level canonical decomposition, or None."""
    d = unicodedata.decomposition(chr(cp))
    if not d or d.startswith("<"):
        return None
    return [int(tok, 16) for tok in d.split()]


def full_decomposition(cp: int, cache: dict):
    if cp in cache:
        return cache[cp]
    raw = canonical_raw(cp)
    if raw is None or is_hangul_syllable(cp):
        out = [cp]
    else:
        out = []
        for part in raw:
            out.extend(full_decomposition(part, cache))
    cache[cp] = out
    return out


def main() -> int:
    ccc = []
    for cp in range(MAX_CP):
        k = unicodedata.combining(chr(cp))
        if k:
            ccc.append((cp, k))

    cache = {}
    decomp = []
    for cp in range(MAX_CP):
        if is_hangul_syllable(cp):
            continue
        if canonical_raw(cp) is None:
            continue
        expansion = full_decomposition(cp, cache)
        decomp.append((cp, expansion))

    # Primary composition pairs.  Testing round-trip through Python's own NFC
    # keeps the exclusion list and non-starter rules in sync with unicodedata.
    comp = []
    for cp, expansion in decomp:
        raw = canonical_raw(cp)
        if raw is None or len(raw) != 2:
            continue
        a, b = raw
        if unicodedata.normalize("NFC", chr(a) + chr(b)) == chr(cp):
            comp.append((a, b, cp))
    comp.sort()

    expansion_pool = []
    decomp_index = []
    for cp, expansion in decomp:
        decomp_index.append((cp, len(expansion_pool), len(expansion)))
        expansion_pool.extend(expansion)

    out = sys.stdout
    out.write("// Generated by scripts/gen_unicode_tables.py -- do not edit.\n")
    out.write(f"// Unicode data version: {unicodedata.unidata_version}\n\n")

    out.write(f"inline constexpr char32_t kUnicodeDataVersionMajor = "
              f"{unicodedata.unidata_version.split('.')[0]};\n\n")

    out.write(f"inline constexpr std::size_t kCombiningClassCount = {len(ccc)};\n")
    out.write("inline constexpr CombiningClassEntry kCombiningClasses[] = {\n")
    for cp, k in ccc:
        out.write(f"    {{0x{cp:05X}, {k}}},\n")
    out.write("};\n\n")

    out.write(f"inline constexpr std::size_t kDecompositionCount = {len(decomp_index)};\n")
    out.write("inline constexpr DecompositionEntry kDecompositions[] = {\n")
    for cp, offset, length in decomp_index:
        out.write(f"    {{0x{cp:05X}, {offset}, {length}}},\n")
    out.write("};\n\n")

    out.write(f"inline constexpr std::size_t kDecompositionPoolSize = {len(expansion_pool)};\n")
    out.write("inline constexpr char32_t kDecompositionPool[] = {\n")
    for i in range(0, len(expansion_pool), 8):
        row = ", ".join(f"0x{cp:05X}" for cp in expansion_pool[i:i + 8])
        out.write(f"    {row},\n")
    out.write("};\n\n")

    out.write(f"inline constexpr std::size_t kCompositionCount = {len(comp)};\n")
    out.write("inline constexpr CompositionEntry kCompositions[] = {\n")
    for a, b, c in comp:
        out.write(f"    {{0x{a:05X}, 0x{b:05X}, 0x{c:05X}}},\n")
    out.write("};\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
