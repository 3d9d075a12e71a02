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

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mel {

// Token ids are shifted Unicode scalar values; 0..2 are reserved for the
// decoder and never produced by tokenizing text.
using TokenId = std::uint32_t;
inline constexpr TokenId kPadToken = 0;
inline constexpr TokenId kBosToken = 1;
inline constexpr TokenId kEosToken = 2;
inline constexpr TokenId kTokenOffset = 3;

using TokenSequence = std::vector<TokenId>;

// Opaque KB entity id (Q-number style). Non-empty.
class EntityId {
 public:
  EntityId() = default;
  explicit EntityId(std::string value) : value_(std::move(value)) {
    if (value_.empty()) throw std::invalid_argument("EntityId must be non-empty");
  }

  const std::string& value() const { return value_; }
  bool empty() const { return value_.empty(); }

  auto operator<=>(const EntityId&) const = default;

 private:
  std::string value_;
};

// Lowercase ISO-639-style language code: 2..12 chars, ASCII letters and
// hyphens. The character set keeps rendered identifiers parseable.
class LanguageCode {
 public:
  LanguageCode() = default;
  explicit LanguageCode(std::string value) : value_(std::move(value)) {
    if (!valid(value_)) throw std::invalid_argument("invalid language code: '" + value_ + "'");
  }

  static bool valid(std::string_view value) {
    if (value.size() < 2 || value.size() > 12) return false;
    for (char c : value) {
      if (!((c >= 'a' && c <= 'z') || c == '-')) return false;
    }
    return true;
  }

  const std::string& value() const { return value_; }
  bool empty() const { return value_.empty(); }

  auto operator<=>(const LanguageCode&) const = default;

 private:
  std::string value_;
};

}  // namespace mel

template <>
struct std::hash<mel::EntityId> {
  std::size_t operator()(const mel::EntityId& id) const noexcept {
    return std::hash<std::string>{}(id.value());
  }
};

template <>
struct std::hash<mel::LanguageCode> {
  std::size_t operator()(const mel::LanguageCode& lang) const noexcept {
    return std::hash<std::string>{}(lang.value());
  }
};
