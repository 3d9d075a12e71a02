// Copyright 2026 The MEL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mel/unicode.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>

namespace mel {
namespace {

struct CombiningClassEntry {
  char32_t codepoint;
  std::uint8_t combining_class;
};

struct DecompositionEntry {
  char32_t codepoint;
  std::uint32_t pool_offset;
  std::uint16_t length;
};

struct CompositionEntry {
  char32_t first;
  char32_t second;
  char32_t composed;
};

#include "unicode_tables.inc"

// Hangul syllable arithmetic per the Unicode standard, chapter 3.12.
constexpr char32_t kHangulSBase = 0xAC00;
constexpr char32_t kHangulLBase = 0x1100;
constexpr char32_t kHangulVBase = 0x1161;
constexpr char32_t kHangulTBase = 0x11A7;
constexpr int kHangulLCount = 19;
constexpr int kHangulVCount = 21;
constexpr int kHangulTCount = 28;
constexpr int kHangulNCount = kHangulVCount * kHangulTCount;
constexpr int kHangulSCount = kHangulLCount * kHangulNCount;

bool is_hangul_syllable(char32_t cp) {
  return cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount;
}

void decompose_hangul(char32_t cp, std::u32string& out) {
  const int index = static_cast<int>(cp - kHangulSBase);
  out.push_back(kHangulLBase + index / kHangulNCount);
  out.push_back(kHangulVBase + (index % kHangulNCount) / kHangulTCount);
  const int trailing = index % kHangulTCount;
  if (trailing != 0) out.push_back(kHangulTBase + trailing);
}

// (L,V) and (LV,T) compositions are algorithmic and not in the table.
bool compose_hangul(char32_t a, char32_t b, char32_t& out) {
  if (a >= kHangulLBase && a < kHangulLBase + kHangulLCount && b >= kHangulVBase &&
      b < kHangulVBase + kHangulVCount) {
    const int l = static_cast<int>(a - kHangulLBase);
    const int v = static_cast<int>(b - kHangulVBase);
    out = kHangulSBase + static_cast<char32_t>((l * kHangulVCount + v) * kHangulTCount);
    return true;
  }
  if (is_hangul_syllable(a) && (a - kHangulSBase) % kHangulTCount == 0 && b > kHangulTBase &&
      b < kHangulTBase + kHangulTCount) {
    out = a + (b - kHangulTBase);
    return true;
  }
  return false;
}

const DecompositionEntry* find_decomposition(char32_t cp) {
  const auto* begin = kDecompositions;
  const auto* end = kDecompositions + kDecompositionCount;
  const auto* it = std::lower_bound(
      begin, end, cp, [](const DecompositionEntry& e, char32_t c) { return e.codepoint < c; });
  return (it != end && it->codepoint == cp) ? it : nullptr;
}

bool find_composition(char32_t a, char32_t b, char32_t& out) {
  if (compose_hangul(a, b, out)) return true;
  const auto* begin = kCompositions;
  const auto* end = kCompositions + kCompositionCount;
  const auto* it = std::lower_bound(begin, end, std::pair<char32_t, char32_t>{a, b},
                                    [](const CompositionEntry& e, std::pair<char32_t, char32_t> k) {
                                      return e.first != k.first ? e.first < k.first
                                                                : e.second < k.second;
                                    });
  if (it != end && it->first == a && it->second == b) {
    out = it->composed;
    return true;
  }
  return false;
}

[[noreturn]] void bad_utf8(std::size_t offset) {
  throw std::invalid_argument("invalid UTF-8 at byte offset " + std::to_string(offset));
}

}  // namespace

std::uint8_t combining_class(char32_t cp) {
  const auto* begin = kCombiningClasses;
  const auto* end = kCombiningClasses + kCombiningClassCount;
  const auto* it = std::lower_bound(
      begin, end, cp, [](const CombiningClassEntry& e, char32_t c) { return e.codepoint < c; });
  return (it != end && it->codepoint == cp) ? it->combining_class : 0;
}

std::u32string utf8_decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char lead = static_cast<unsigned char>(text[i]);
    std::size_t len;
    char32_t cp;
    if (lead < 0x80) {
      len = 1;
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      len = 2;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      len = 3;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      len = 4;
      cp = lead & 0x07;
    } else {
      bad_utf8(i);
    }
    if (i + len > text.size()) bad_utf8(i);
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) bad_utf8(i + k);
      cp = (cp << 6) | (cont & 0x3F);
    }
    // Reject overlong forms, surrogates, and out-of-range values.
    static constexpr char32_t kMinByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinByLen[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) bad_utf8(i);
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode_one(char32_t cp) {
  std::string out;
  if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    throw std::invalid_argument("codepoint out of range: " + std::to_string(cp));
  }
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
  return out;
}

std::string utf8_encode(std::u32string_view codepoints) {
  std::string out;
  out.reserve(codepoints.size());
  for (char32_t cp : codepoints) out += utf8_encode_one(cp);
  return out;
}

std::u32string nfc(std::u32string_view codepoints) {
  // 1. Canonical decomposition.
  std::u32string decomposed;
  decomposed.reserve(codepoints.size());
  for (char32_t cp : codepoints) {
    if (is_hangul_syllable(cp)) {
      decompose_hangul(cp, decomposed);
    } else if (const auto* entry = find_decomposition(cp)) {
      decomposed.append(kDecompositionPool + entry->pool_offset, entry->length);
    } else {
      decomposed.push_back(cp);
    }
  }

  // 2. Canonical ordering: bubble adjacent marks with descending nonzero
  // classes. Runs of combining marks are short, so this is fine.
  for (std::size_t i = 1; i < decomposed.size(); ++i) {
    const std::uint8_t cc = combining_class(decomposed[i]);
    if (cc == 0) continue;
    std::size_t j = i;
    while (j > 0) {
      const std::uint8_t prev = combining_class(decomposed[j - 1]);
      if (prev == 0 || prev <= cc) break;
      std::swap(decomposed[j - 1], decomposed[j]);
      --j;
    }
  }

  // 3. Canonical composition per UAX #15: combine each character with the
  // last starter unless a mark with combining class >= its own intervenes.
  std::u32string out;
  out.reserve(decomposed.size());
  std::ptrdiff_t last_starter = -1;
  std::uint8_t last_cc = 0;
  for (char32_t cp : decomposed) {
    const std::uint8_t cc = combining_class(cp);
    char32_t composed;
    const bool blocked = last_starter < 0 || (last_cc != 0 && last_cc >= cc);
    if (!blocked && find_composition(out[static_cast<std::size_t>(last_starter)], cp, composed)) {
      out[static_cast<std::size_t>(last_starter)] = composed;
      continue;
    }
    if (cc == 0) {
      last_starter = static_cast<std::ptrdiff_t>(out.size());
      last_cc = 0;
    } else {
      last_cc = cc;
    }
    out.push_back(cp);
  }
  return out;
}

std::string nfc(std::string_view text) { return utf8_encode(nfc(utf8_decode(text))); }

}  // namespace mel
