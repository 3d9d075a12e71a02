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
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mel/errors.hpp"
#include "mel/identifier_codec.hpp"
#include "mel/kb_store.hpp"
#include "mel/types.hpp"

namespace mel {

struct TriePayloadEntry {
  EntityId entity;
  LanguageCode lang;
  bool is_redirect = false;

  auto operator<=>(const TriePayloadEntry&) const = default;
};

// Entities reachable at a terminal node. More than one entry means the same
// rendered identifier names several entities (homographs) or several
// languages of one entity.
using TriePayload = std::vector<TriePayloadEntry>;

// Immutable token-level prefix tree over rendered identifiers. Nodes are
// stored in a preorder-numbered arena with first-child/next-sibling links;
// payload strings are interned. Children are sorted by token id, which makes
// structure, iteration, and the serialized form independent of insertion
// order. Concurrent reads are safe.
class Trie {
 public:
  class Builder {
   public:
    void insert(std::span<const TokenId> tokens, const EntityId& entity,
                const LanguageCode& lang, bool is_redirect);
    void set_provenance(RenderMode mode, bool redirects_included);
    Trie build() &&;

   private:
    friend class Trie;
    struct Node {
      TokenId token = 0;
      std::uint32_t first_child = kNil;
      std::uint32_t next_sibling = kNil;
      std::uint32_t payload = kNil;
    };
    std::vector<Node> nodes_{Node{}};
    std::vector<std::vector<std::uint64_t>> payloads_;  // packed entry keys
    std::vector<std::string> entity_names_;
    std::vector<std::string> lang_names_;
    std::unordered_map<std::string, std::uint32_t> entity_index_;
    std::unordered_map<std::string, std::uint32_t> lang_index_;
    std::uint64_t name_count_ = 0;
    RenderMode mode_ = RenderMode::kCanonical;
    bool redirects_included_ = false;
  };

  Trie() = default;

  // Child tokens at the node reached by `prefix`, plus kEosToken when that
  // node is terminal. Empty when the prefix leaves the trie. Ascending.
  std::vector<TokenId> allowed_next(std::span<const TokenId> prefix) const;

  // Payload at a complete identifier; throws NotAnIdentifier otherwise.
  TriePayload payload(std::span<const TokenId> tokens) const;
  bool is_identifier(std::span<const TokenId> tokens) const;

  std::uint64_t node_count() const { return nodes_.size(); }
  std::uint64_t name_count() const { return name_count_; }
  bool empty() const { return name_count_ == 0; }

  // Provenance recorded at build time so downstream stages can rebuild
  // consistent candidate-restricted tries.
  RenderMode mode() const { return mode_; }
  bool redirects_included() const { return redirects_included_; }

  void serialize(std::ostream& out) const;
  static Trie deserialize(std::istream& in);

  bool operator==(const Trie& other) const;

 private:
  static constexpr std::uint32_t kNil = 0xFFFFFFFF;

  struct Node {
    TokenId token = 0;
    std::uint32_t first_child = kNil;
    std::uint32_t next_sibling = kNil;
    std::uint32_t payload = kNil;

    bool operator==(const Node&) const = default;
  };

  struct PayloadEntry {
    std::uint32_t entity = 0;
    std::uint32_t lang = 0;
    std::uint8_t is_redirect = 0;

    bool operator==(const PayloadEntry&) const = default;
  };

  std::uint32_t walk(std::span<const TokenId> tokens) const;

  std::vector<Node> nodes_{Node{}};
  std::vector<std::vector<PayloadEntry>> payloads_;
  std::vector<std::string> entity_names_;
  std::vector<std::string> lang_names_;
  std::uint64_t name_count_ = 0;
  RenderMode mode_ = RenderMode::kCanonical;
  bool redirects_included_ = false;
};

// Trie over all KB entities. Canonical mode inserts each entity's canonical
// name only; the other modes insert every per-language name and optionally
// every redirect.
Trie build_kb_trie(const KnowledgeBase& kb, RenderMode mode, bool include_redirects);

// Trie over the identifiers of the candidate set only, built with the same
// rules as build_kb_trie. Throws UnknownEntity for candidates outside the
// KB. An empty candidate set yields an empty trie.
Trie restrict_to_candidates(const KnowledgeBase& kb, const std::set<EntityId>& candidates,
                            RenderMode mode, bool include_redirects = true);

}  // namespace mel
