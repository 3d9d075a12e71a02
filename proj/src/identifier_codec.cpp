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

#include "mel/identifier_codec.hpp"

#include "mel/unicode.hpp"

namespace mel {

std::string to_string(RenderMode mode) {
  switch (mode) {
    case RenderMode::kCanonical:
      return "canonical";
    case RenderMode::kLangFirst:
      return "lang-first";
    case RenderMode::kNameFirst:
      return "name-first";
  }
  return "?";
}

std::optional<RenderMode> render_mode_from_string(std::string_view text) {
  if (text == "canonical") return RenderMode::kCanonical;
  if (text == "lang-first") return RenderMode::kLangFirst;
  if (text == "name-first") return RenderMode::kNameFirst;
  return std::nullopt;
}

std::string render(const LanguageCode& lang, const std::string& name, RenderMode mode) {
  if (name.empty()) throw std::invalid_argument("cannot render an empty name");
  if (name.find(kIdentifierSeparator) != std::string::npos) throw SeparatorInName(name);
  switch (mode) {
    case RenderMode::kCanonical:
      return name;
    case RenderMode::kLangFirst:
      return lang.value() + std::string(kIdentifierSeparator) + name;
    case RenderMode::kNameFirst:
      return name + std::string(kIdentifierSeparator) + lang.value();
  }
  throw std::logic_error("unreachable render mode");
}

std::pair<std::optional<LanguageCode>, std::string> parse(const std::string& text,
                                                          RenderMode mode) {
  switch (mode) {
    case RenderMode::kCanonical: {
      if (text.empty()) throw UnparseableIdentifier(text, to_string(mode));
      return {std::nullopt, text};
    }
    case RenderMode::kLangFirst: {
      const auto pos = text.find(kIdentifierSeparator);
      if (pos == std::string::npos) throw UnparseableIdentifier(text, to_string(mode));
      const std::string lang = text.substr(0, pos);
      const std::string name = text.substr(pos + kIdentifierSeparator.size());
      if (name.empty() || !LanguageCode::valid(lang)) {
        throw UnparseableIdentifier(text, to_string(mode));
      }
      return {LanguageCode(lang), name};
    }
    case RenderMode::kNameFirst: {
      const auto pos = text.rfind(kIdentifierSeparator);
      if (pos == std::string::npos) throw UnparseableIdentifier(text, to_string(mode));
      const std::string name = text.substr(0, pos);
      const std::string lang = text.substr(pos + kIdentifierSeparator.size());
      if (name.empty() || !LanguageCode::valid(lang)) {
        throw UnparseableIdentifier(text, to_string(mode));
      }
      return {LanguageCode(lang), name};
    }
  }
  throw std::logic_error("unreachable render mode");
}

TokenSequence tokenize(std::string_view text) {
  const std::u32string codepoints = utf8_decode(text);
  TokenSequence tokens;
  tokens.reserve(codepoints.size());
  for (char32_t cp : codepoints) tokens.push_back(static_cast<TokenId>(cp) + kTokenOffset);
  return tokens;
}

std::string detokenize(const TokenSequence& tokens) {
  std::u32string codepoints;
  codepoints.reserve(tokens.size());
  for (TokenId t : tokens) {
    if (t < kTokenOffset) throw ReservedTokenInSequence(t);
    codepoints.push_back(static_cast<char32_t>(t - kTokenOffset));
  }
  return utf8_encode(codepoints);
}

}  // namespace mel
