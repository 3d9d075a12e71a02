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

#include "mel/prefix_trie.hpp"

#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mel/identifier_codec.hpp"

using namespace mel;

namespace {

const EntityId kQ1("Q1");
const EntityId kQ2("Q2");
const LanguageCode kEn("en");

Trie make_trie(const std::vector<std::pair<std::string, EntityId>>& names) {
  Trie::Builder builder;
  for (const auto& [name, entity] : names) {
    builder.insert(tokenize(name), entity, kEn, false);
  }
  return std::move(builder).build();
}

// Independent oracle: the node count of a trie is the number of distinct
// non-empty prefixes of the inserted sequences, plus the root.
std::size_t prefix_oracle_node_count(const std::vector<std::string>& names) {
  std::set<std::u32string> prefixes;
  for (const std::string& name : names) {
    const std::u32string cps = utf8_decode(name);
    for (std::size_t len = 1; len <= cps.size(); ++len) {
      prefixes.insert(cps.substr(0, len));
    }
  }
  return prefixes.size() + 1;
}

}  // namespace

TEST_CASE("build produces the hand-drawn trie for {AB, AC}") {
  const Trie trie = make_trie({{"AB", kQ1}, {"AC", kQ2}});
  CHECK(trie.node_count() == 4);  // root, A, AB, AC
  CHECK(trie.name_count() == 2);

  CHECK(trie.allowed_next(tokenize("")) == std::vector<TokenId>{tokenize("A")[0]});
  CHECK(trie.allowed_next(tokenize("A")) ==
        std::vector<TokenId>{tokenize("B")[0], tokenize("C")[0]});
  CHECK(trie.allowed_next(tokenize("AB")) == std::vector<TokenId>{kEosToken});
  CHECK(trie.allowed_next(tokenize("ZZ")).empty());
}

TEST_CASE("empty trie has a lone root") {
  const Trie trie = make_trie({});
  CHECK(trie.node_count() == 1);
  CHECK(trie.name_count() == 0);
  CHECK(trie.empty());
  CHECK(trie.allowed_next(tokenize("")).empty());
}

TEST_CASE("identical sequences merge payloads") {
  const Trie trie = make_trie({{"X", kQ1}, {"X", kQ2}});
  CHECK(trie.name_count() == 1);
  const TriePayload payload = trie.payload(tokenize("X"));
  REQUIRE(payload.size() == 2);
  CHECK(payload[0].entity == kQ1);
  CHECK(payload[1].entity == kQ2);
}

TEST_CASE("payload lookups") {
  const Trie trie = make_trie({{"AB", kQ1}});
  const TriePayload payload = trie.payload(tokenize("AB"));
  REQUIRE(payload.size() == 1);
  CHECK(payload[0].entity == kQ1);
  CHECK(payload[0].lang == kEn);
  CHECK(!payload[0].is_redirect);

  CHECK_THROWS_AS(trie.payload(tokenize("A")), NotAnIdentifier);   // internal node
  CHECK_THROWS_AS(trie.payload(tokenize("ZZ")), NotAnIdentifier);  // off the trie
}

TEST_CASE("insert validates sequences") {
  Trie::Builder builder;
  CHECK_THROWS_AS(builder.insert(TokenSequence{}, kQ1, kEn, false), EmptySequence);
  CHECK_THROWS_AS(builder.insert(TokenSequence{kEosToken}, kQ1, kEn, false),
                  ReservedTokenInSequence);
  CHECK_THROWS_AS(builder.insert(TokenSequence{68, kBosToken}, kQ1, kEn, false),
                  ReservedTokenInSequence);
}

TEST_CASE("build is insertion-order independent, bit for bit") {
  const std::vector<std::pair<std::string, EntityId>> names = {
      {"rome", kQ1}, {"roma", kQ2}, {"rom", kQ1}, {"paris", kQ2}};
  auto reversed = names;
  std::reverse(reversed.begin(), reversed.end());
  const Trie forward = make_trie(names);
  const Trie backward = make_trie(reversed);
  CHECK(forward == backward);

  std::ostringstream a, b;
  forward.serialize(a);
  backward.serialize(b);
  CHECK(a.str() == b.str());
}

TEST_CASE("node_count matches the prefix-set oracle on random name sets") {
  std::mt19937 rng(11);
  const std::string alphabet = "abcdeé中";
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> names;
    std::vector<std::pair<std::string, EntityId>> items;
    const int count = 1 + static_cast<int>(rng() % 200);
    for (int i = 0; i < count; ++i) {
      const std::u32string pool = utf8_decode(alphabet);
      std::u32string name;
      const int len = 1 + static_cast<int>(rng() % 10);
      for (int k = 0; k < len; ++k) name.push_back(pool[rng() % pool.size()]);
      names.push_back(utf8_encode(name));
      items.emplace_back(names.back(), rng() % 2 ? kQ1 : kQ2);
    }
    const Trie trie = make_trie(items);
    CHECK(trie.node_count() == prefix_oracle_node_count(names));

    std::set<std::string> distinct(names.begin(), names.end());
    CHECK(trie.name_count() == distinct.size());
  }
}

TEST_CASE("completeness and soundness walking allowed_next") {
  std::mt19937 rng(23);
  std::vector<std::pair<std::string, EntityId>> items;
  for (int i = 0; i < 50; ++i) {
    std::string name;
    const int len = 1 + static_cast<int>(rng() % 8);
    for (int k = 0; k < len; ++k) name.push_back('a' + static_cast<char>(rng() % 4));
    items.emplace_back(name, kQ1);
  }
  const Trie trie = make_trie(items);

  // Completeness: every inserted identifier is reachable step by step and
  // finishes with EOS available.
  for (const auto& [name, entity] : items) {
    const TokenSequence tokens = tokenize(name);
    TokenSequence prefix;
    for (TokenId t : tokens) {
      const auto allowed = trie.allowed_next(prefix);
      CHECK(std::find(allowed.begin(), allowed.end(), t) != allowed.end());
      prefix.push_back(t);
    }
    const auto at_end = trie.allowed_next(prefix);
    CHECK(std::find(at_end.begin(), at_end.end(), kEosToken) != at_end.end());
  }

  // Soundness: depth-first follow every allowed path; each EOS corresponds
  // to exactly one inserted name.
  std::set<std::string> inserted;
  for (const auto& [name, entity] : items) inserted.insert(name);
  std::set<std::string> accepted;
  std::vector<TokenSequence> stack{TokenSequence{}};
  while (!stack.empty()) {
    TokenSequence prefix = std::move(stack.back());
    stack.pop_back();
    for (TokenId t : trie.allowed_next(prefix)) {
      if (t == kEosToken) {
        accepted.insert(detokenize(prefix));
        continue;
      }
      TokenSequence next = prefix;
      next.push_back(t);
      stack.push_back(std::move(next));
    }
  }
  CHECK(accepted == inserted);
}

TEST_CASE("restrict builds a sub-trie of the full trie") {
  std::vector<EntityRecord> records;
  for (int e = 0; e < 12; ++e) {
    EntityRecord record;
    record.id = EntityId("Q" + std::to_string(e));
    record.names[LanguageCode("en")] = "shared-" + std::to_string(e % 5);
    record.names[LanguageCode("de")] = "geteilt-" + std::to_string(e);
    if (e % 3 == 0) record.redirects[LanguageCode("en")].insert("alias-" + std::to_string(e));
    records.push_back(std::move(record));
  }
  const KnowledgeBase kb = KnowledgeBase::ingest(records);
  const Trie full = build_kb_trie(kb, RenderMode::kNameFirst, true);

  const std::set<EntityId> candidates{EntityId("Q0"), EntityId("Q7")};
  const Trie restricted = restrict_to_candidates(kb, candidates, RenderMode::kNameFirst, true);

  // name_count equals the candidates' identifier count
  std::size_t expected = 0;
  for (const EntityId& id : candidates) expected += kb.identifiers(id, true).size();
  CHECK(restricted.name_count() == expected);

  // allowed_next of the restriction never leaves the full trie's allowed set
  std::vector<TokenSequence> stack{TokenSequence{}};
  while (!stack.empty()) {
    TokenSequence prefix = std::move(stack.back());
    stack.pop_back();
    const auto sub = restricted.allowed_next(prefix);
    const auto sup = full.allowed_next(prefix);
    for (TokenId t : sub) {
      CHECK(std::find(sup.begin(), sup.end(), t) != sup.end());
      if (t != kEosToken) {
        TokenSequence next = prefix;
        next.push_back(t);
        stack.push_back(std::move(next));
      }
    }
  }

  CHECK(restrict_to_candidates(kb, {}, RenderMode::kNameFirst, true).empty());
  CHECK_THROWS_AS(restrict_to_candidates(kb, {EntityId("Q404")}, RenderMode::kNameFirst, true),
                  UnknownEntity);
}

TEST_CASE("canonical mode uses one identifier per entity and rejects none") {
  std::vector<EntityRecord> records;
  for (int e = 0; e < 6; ++e) {
    EntityRecord record;
    record.id = EntityId("Q" + std::to_string(e));
    record.names[LanguageCode("en")] = "name-" + std::to_string(e);
    record.names[LanguageCode("fr")] = "nom-" + std::to_string(e);
    record.mention_counts[LanguageCode("fr")] = 10;
    records.push_back(std::move(record));
  }
  const KnowledgeBase kb = KnowledgeBase::ingest(records);
  const Trie trie = build_kb_trie(kb, RenderMode::kCanonical, false);
  CHECK(trie.name_count() == 6);
  CHECK(trie.payload(tokenize("nom-0")).front().entity == EntityId("Q0"));
}

TEST_CASE("serialize round-trips structurally") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::pair<std::string, EntityId>> items;
    const int count = static_cast<int>(rng() % 400);
    for (int i = 0; i < count; ++i) {
      std::string name;
      const int len = 1 + static_cast<int>(rng() % 12);
      for (int k = 0; k < len; ++k) name.push_back('a' + static_cast<char>(rng() % 6));
      items.emplace_back(name, EntityId("Q" + std::to_string(rng() % 40)));
    }
    const Trie trie = make_trie(items);
    std::stringstream buffer;
    trie.serialize(buffer);
    const Trie loaded = Trie::deserialize(buffer);
    CHECK(loaded == trie);
  }

  // empty trie round-trips too
  const Trie empty = make_trie({});
  std::stringstream buffer;
  empty.serialize(buffer);
  CHECK(Trie::deserialize(buffer) == empty);
}

TEST_CASE("deserialize rejects truncated and tampered bytes") {
  const Trie trie = make_trie({{"abc", kQ1}, {"abd", kQ2}});
  std::ostringstream buffer;
  trie.serialize(buffer);
  const std::string bytes = buffer.str();

  for (std::size_t cut : {std::size_t{3}, std::size_t{9}, bytes.size() - 1}) {
    std::stringstream truncated(bytes.substr(0, cut));
    CHECK_THROWS_AS(Trie::deserialize(truncated), CorruptTrieFile);
  }

  std::string wrong_version = bytes;
  wrong_version[5] = '9';
  std::stringstream versioned(wrong_version);
  CHECK_THROWS_AS(Trie::deserialize(versioned), VersionMismatch);

  std::stringstream trailing(bytes + "x");
  CHECK_THROWS_AS(Trie::deserialize(trailing), CorruptTrieFile);
}

TEST_CASE("shared prefixes keep the trie compact") {
  std::vector<std::pair<std::string, EntityId>> items;
  std::size_t total_chars = 0;
  for (int i = 0; i < 200; ++i) {
    const std::string name = "aaaaaaaaaaaaaaaaaaaa-" + std::to_string(i);
    total_chars += utf8_decode(name).size();
    items.emplace_back(name, kQ1);
  }
  const Trie trie = make_trie(items);
  std::vector<std::string> names;
  for (const auto& [name, entity] : items) names.push_back(name);
  CHECK(trie.node_count() == prefix_oracle_node_count(names));
  CHECK(trie.node_count() < total_chars / 2);
}
