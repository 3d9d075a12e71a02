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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mel {

// UTF-8 <-> codepoint conversion. Invalid byte sequences throw
// std::invalid_argument; all inputs in this codebase are required to be
// well-formed UTF-8.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view codepoints);
std::string utf8_encode_one(char32_t codepoint);

// Canonical composition normal form (NFC). Decomposes canonically
// (Hangul algorithmically, the rest via generated tables), applies the
// canonical ordering algorithm, then recomposes primary composites.
std::string nfc(std::string_view text);
std::u32string nfc(std::u32string_view codepoints);

// Canonical combining class of a codepoint (0 for starters).
std::uint8_t combining_class(char32_t codepoint);

}  // namespace mel
