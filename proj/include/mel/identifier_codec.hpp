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

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "mel/errors.hpp"
#include "mel/types.hpp"

namespace mel {

// How a <language, name> identifier is rendered to the string the decoder
// generates. Canonical renders the bare name; the other two join name and
// language with kIdentifierSeparator in either order.
enum class RenderMode { kCanonical, kLangFirst, kNameFirst };

inline constexpr std::string_view kIdentifierSeparator = " >> ";

std::string to_string(RenderMode mode);
std::optional<RenderMode> render_mode_from_string(std::string_view text);

// Renders an identifier. Throws SeparatorInName if the name embeds the
// separator substring; such names are rejected rather than escaped.
std::string render(const LanguageCode& lang, const std::string& name, RenderMode mode);

// Exact inverse of render. Canonical yields no language. NameFirst splits on
// the last separator occurrence, LangFirst on the first, so names containing
// " >> "-free text round-trip unambiguously.
std::pair<std::optional<LanguageCode>, std::string> parse(const std::string& text,
                                                          RenderMode mode);

// Reference tokenizer: Unicode scalar value c maps to TokenId c + 3, keeping
// ids 0..2 reserved. Reversible on all valid strings.
TokenSequence tokenize(std::string_view text);
std::string detokenize(const TokenSequence& tokens);

}  // namespace mel
