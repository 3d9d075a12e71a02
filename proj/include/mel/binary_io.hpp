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
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "mel/errors.hpp"

namespace mel {

// Little-endian varint/string primitives for the binary artifacts. Every
// artifact starts with an 8-byte tag: a 5-byte format name plus a 3-digit
// version, e.g. "MELTR001". Readers track the byte offset so corruption
// errors can point at a location.

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void tag(std::string_view tag8) { out_.write(tag8.data(), 8); }

  void varint(std::uint64_t value) {
    while (value >= 0x80) {
      put(static_cast<std::uint8_t>(value) | 0x80);
      value >>= 7;
    }
    put(static_cast<std::uint8_t>(value));
  }

  void string(std::string_view s) {
    varint(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

  void f64(double value) {
    static_assert(sizeof(double) == 8);
    std::uint64_t bits;
    std::memcpy(&bits, &value, 8);
    for (int i = 0; i < 8; ++i) put(static_cast<std::uint8_t>(bits >> (8 * i)));
  }

 private:
  void put(std::uint8_t byte) { out_.put(static_cast<char>(byte)); }
  std::ostream& out_;
};

class BinaryReader {
 public:
  BinaryReader(std::istream& in, std::string artifact)
      : in_(in), artifact_(std::move(artifact)) {}

  // Checks the 8-byte tag; distinguishes a wrong artifact from a wrong
  // version of the right artifact.
  void expect_tag(std::string_view tag8) {
    char found[8];
    in_.read(found, 8);
    if (in_.gcount() != 8) fail("missing header");
    offset_ += 8;
    const std::string_view got(found, 8);
    if (got.substr(0, 5) != tag8.substr(0, 5)) fail("bad magic");
    if (got != tag8) throw VersionMismatch(artifact_, std::string(got.substr(5)));
  }

  std::uint64_t varint() {
    std::uint64_t value = 0;
    int shift = 0;
    while (true) {
      const int c = in_.get();
      if (c == std::char_traits<char>::eof()) fail("truncated varint");
      ++offset_;
      value |= static_cast<std::uint64_t>(c & 0x7F) << shift;
      if ((c & 0x80) == 0) break;
      shift += 7;
      if (shift > 63) fail("varint overflow");
    }
    return value;
  }

  std::string string(std::uint64_t max_len = 1 << 20) {
    const std::uint64_t len = varint();
    if (len > max_len) fail("string length out of range");
    std::string s(len, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(len));
    if (static_cast<std::uint64_t>(in_.gcount()) != len) fail("truncated string");
    offset_ += len;
    return s;
  }

  double f64() {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      const int c = in_.get();
      if (c == std::char_traits<char>::eof()) fail("truncated float");
      ++offset_;
      bits |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(c)) << (8 * i);
    }
    double value;
    std::memcpy(&value, &bits, 8);
    return value;
  }

  void expect_eof() {
    if (in_.peek() != std::char_traits<char>::eof()) fail("trailing bytes");
  }

  std::size_t offset() const { return offset_; }

  [[noreturn]] void fail(const std::string& reason) {
    if (artifact_ == "trie") throw CorruptTrieFile(offset_, reason);
    throw CorruptFile(artifact_, reason + " at offset " + std::to_string(offset_));
  }

 private:
  std::istream& in_;
  std::string artifact_;
  std::size_t offset_ = 0;
};

}  // namespace mel
