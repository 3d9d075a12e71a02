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

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <utility>

#include "mel/binary_io.hpp"

namespace mel {

namespace {
constexpr std::string_view kTrieTag = "MELTR001";

std::uint64_t pack_entry(std::uint32_t entity, std::uint32_t lang, bool is_redirect) {
  return (static_cast<std::uint64_t>(entity) << 25) | (static_cast<std::uint64_t>(lang) << 1) |
         (is_redirect ? 1 : 0);
}
}  // namespace

void Trie::Builder::set_provenance(RenderMode mode, bool redirects_included) {
  mode_ = mode;
  redirects_included_ = redirects_included;
}

void Trie::Builder::insert(std::span<const TokenId> tokens, const EntityId& entity,
                           const LanguageCode& lang, bool is_redirect) {
  if (tokens.empty()) throw EmptySequence();
  for (TokenId t : tokens) {
    if (t < kTokenOffset) throw ReservedTokenInSequence(t);
  }

  std::uint32_t cur = 0;
  for (TokenId t : tokens) {
    std::uint32_t prev = kNil;
    std::uint32_t child = nodes_[cur].first_child;
    while (child != kNil && nodes_[child].token < t) {
      prev = child;
      child = nodes_[child].next_sibling;
    }
    if (child == kNil || nodes_[child].token != t) {
      const auto fresh = static_cast<std::uint32_t>(nodes_.size());
      nodes_.push_back(Node{t, kNil, child, kNil});
      if (prev == kNil) {
        nodes_[cur].first_child = fresh;
      } else {
        nodes_[prev].next_sibling = fresh;
      }
      child = fresh;
    }
    cur = child;
  }

  if (nodes_[cur].payload == kNil) {
    nodes_[cur].payload = static_cast<std::uint32_t>(payloads_.size());
    payloads_.emplace_back();
    ++name_count_;
  }

  const auto intern = [](std::unordered_map<std::string, std::uint32_t>& index,
                         std::vector<std::string>& table, const std::string& value) {
    const auto [it, inserted] = index.emplace(value, static_cast<std::uint32_t>(table.size()));
    if (inserted) table.push_back(value);
    return it->second;
  };
  const std::uint64_t key =
      pack_entry(intern(entity_index_, entity_names_, entity.value()),
                 intern(lang_index_, lang_names_, lang.value()), is_redirect);
  auto& entries = payloads_[nodes_[cur].payload];
  const auto pos = std::lower_bound(entries.begin(), entries.end(), key);
  if (pos == entries.end() || *pos != key) entries.insert(pos, key);
}

Trie Trie::Builder::build() && {
  // Canonicalize: remap intern tables into lexicographic order and renumber
  // nodes in preorder so equal content yields equal representation no matter
  // the insertion order.
  std::vector<std::uint32_t> entity_order(entity_names_.size());
  std::iota(entity_order.begin(), entity_order.end(), 0);
  std::sort(entity_order.begin(), entity_order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return entity_names_[a] < entity_names_[b];
  });
  std::vector<std::uint32_t> entity_remap(entity_names_.size());
  for (std::uint32_t i = 0; i < entity_order.size(); ++i) entity_remap[entity_order[i]] = i;

  std::vector<std::uint32_t> lang_order(lang_names_.size());
  std::iota(lang_order.begin(), lang_order.end(), 0);
  std::sort(lang_order.begin(), lang_order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return lang_names_[a] < lang_names_[b];
  });
  std::vector<std::uint32_t> lang_remap(lang_names_.size());
  for (std::uint32_t i = 0; i < lang_order.size(); ++i) lang_remap[lang_order[i]] = i;

  Trie trie;
  trie.name_count_ = name_count_;
  trie.mode_ = mode_;
  trie.redirects_included_ = redirects_included_;

  trie.entity_names_.reserve(entity_names_.size());
  for (std::uint32_t idx : entity_order) {
    trie.entity_names_.push_back(std::move(entity_names_[idx]));
  }
  trie.lang_names_.reserve(lang_names_.size());
  for (std::uint32_t idx : lang_order) trie.lang_names_.push_back(std::move(lang_names_[idx]));

  trie.nodes_.clear();
  trie.nodes_.reserve(nodes_.size());
  trie.payloads_.reserve(payloads_.size());

  // Iterative preorder copy over the first-child/next-sibling links. Each
  // popped node pushes its own next sibling (linked from itself) below its
  // first child, so the child subtree lands immediately after the parent.
  struct Frame {
    std::uint32_t builder_node;
    std::uint32_t link_from;
    bool as_child;
  };
  std::vector<Frame> stack;
  stack.push_back({0, kNil, false});
  while (!stack.empty()) {
    const Frame frame = stack.back();
    stack.pop_back();
    const Builder::Node& src = nodes_[frame.builder_node];

    const auto slot = static_cast<std::uint32_t>(trie.nodes_.size());
    if (frame.link_from != kNil) {
      if (frame.as_child) {
        trie.nodes_[frame.link_from].first_child = slot;
      } else {
        trie.nodes_[frame.link_from].next_sibling = slot;
      }
    }

    Node dst;
    dst.token = src.token;
    if (src.payload != kNil) {
      dst.payload = static_cast<std::uint32_t>(trie.payloads_.size());
      std::vector<PayloadEntry> entries;
      entries.reserve(payloads_[src.payload].size());
      for (std::uint64_t key : payloads_[src.payload]) {
        PayloadEntry entry;
        entry.entity = entity_remap[static_cast<std::uint32_t>(key >> 25)];
        entry.lang = lang_remap[static_cast<std::uint32_t>((key >> 1) & 0xFFFFFF)];
        entry.is_redirect = static_cast<std::uint8_t>(key & 1);
        entries.push_back(entry);
      }
      std::sort(entries.begin(), entries.end(), [](const PayloadEntry& a, const PayloadEntry& b) {
        return std::tie(a.entity, a.lang, a.is_redirect) <
               std::tie(b.entity, b.lang, b.is_redirect);
      });
      trie.payloads_.push_back(std::move(entries));
    }
    trie.nodes_.push_back(dst);

    if (src.next_sibling != kNil && frame.builder_node != 0) {
      stack.push_back({src.next_sibling, slot, false});
    }
    if (src.first_child != kNil) {
      stack.push_back({src.first_child, slot, true});
    }
  }
  return trie;
}

std::uint32_t Trie::walk(std::span<const TokenId> tokens) const {
  std::uint32_t cur = 0;
  for (TokenId t : tokens) {
    std::uint32_t child = nodes_[cur].first_child;
    while (child != kNil && nodes_[child].token < t) child = nodes_[child].next_sibling;
    if (child == kNil || nodes_[child].token != t) return kNil;
    cur = child;
  }
  return cur;
}

std::vector<TokenId> Trie::allowed_next(std::span<const TokenId> prefix) const {
  const std::uint32_t node = walk(prefix);
  std::vector<TokenId> out;
  if (node == kNil) return out;
  if (nodes_[node].payload != kNil) out.push_back(kEosToken);
  for (std::uint32_t child = nodes_[node].first_child; child != kNil;
       child = nodes_[child].next_sibling) {
    out.push_back(nodes_[child].token);
  }
  return out;
}

bool Trie::is_identifier(std::span<const TokenId> tokens) const {
  const std::uint32_t node = walk(tokens);
  return node != kNil && nodes_[node].payload != kNil;
}

TriePayload Trie::payload(std::span<const TokenId> tokens) const {
  const std::uint32_t node = walk(tokens);
  if (node == kNil || nodes_[node].payload == kNil) throw NotAnIdentifier();
  TriePayload out;
  const auto& entries = payloads_[nodes_[node].payload];
  out.reserve(entries.size());
  for (const PayloadEntry& entry : entries) {
    out.push_back(TriePayloadEntry{EntityId(entity_names_[entry.entity]),
                                   LanguageCode(lang_names_[entry.lang]),
                                   entry.is_redirect != 0});
  }
  return out;
}

void Trie::serialize(std::ostream& out) const {
  BinaryWriter w(out);
  w.tag(kTrieTag);
  w.varint(static_cast<std::uint64_t>(mode_));
  w.varint(redirects_included_ ? 1 : 0);

  w.varint(lang_names_.size());
  for (const std::string& lang : lang_names_) w.string(lang);
  w.varint(entity_names_.size());
  for (const std::string& entity : entity_names_) w.string(entity);

  w.varint(payloads_.size());
  for (const auto& entries : payloads_) {
    w.varint(entries.size());
    for (const PayloadEntry& entry : entries) {
      w.varint(entry.entity);
      w.varint(entry.lang);
      w.varint(entry.is_redirect);
    }
  }

  w.varint(nodes_.size());
  w.varint(name_count_);

  // Preorder DFS. Per node: payload reference, child count, delta-coded
  // child tokens, then each child subtree in order.
  std::vector<std::uint32_t> stack;
  stack.push_back(0);
  while (!stack.empty()) {
    const std::uint32_t index = stack.back();
    stack.pop_back();
    const Node& node = nodes_[index];

    std::vector<std::uint32_t> children;
    for (std::uint32_t c = node.first_child; c != kNil; c = nodes_[c].next_sibling) {
      children.push_back(c);
    }

    w.varint(node.payload == kNil ? 0 : static_cast<std::uint64_t>(node.payload) + 1);
    w.varint(children.size());
    TokenId prev = 0;
    for (std::size_t i = 0; i < children.size(); ++i) {
      const TokenId token = nodes_[children[i]].token;
      w.varint(i == 0 ? token : token - prev - 1);
      prev = token;
    }
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
  }
}

Trie Trie::deserialize(std::istream& in) {
  BinaryReader r(in, "trie");
  r.expect_tag(kTrieTag);

  Trie trie;
  const std::uint64_t mode = r.varint();
  if (mode > 2) r.fail("bad render mode");
  trie.mode_ = static_cast<RenderMode>(mode);
  trie.redirects_included_ = r.varint() != 0;

  const std::uint64_t lang_count = r.varint();
  trie.lang_names_.reserve(lang_count);
  for (std::uint64_t i = 0; i < lang_count; ++i) trie.lang_names_.push_back(r.string());
  const std::uint64_t entity_count = r.varint();
  trie.entity_names_.reserve(entity_count);
  for (std::uint64_t i = 0; i < entity_count; ++i) trie.entity_names_.push_back(r.string());

  const std::uint64_t payload_count = r.varint();
  trie.payloads_.reserve(payload_count);
  for (std::uint64_t i = 0; i < payload_count; ++i) {
    const std::uint64_t entry_count = r.varint();
    if (entry_count == 0) r.fail("empty payload");
    std::vector<PayloadEntry> entries;
    entries.reserve(entry_count);
    for (std::uint64_t k = 0; k < entry_count; ++k) {
      PayloadEntry entry;
      const std::uint64_t entity = r.varint();
      const std::uint64_t lang = r.varint();
      const std::uint64_t redirect = r.varint();
      if (entity >= trie.entity_names_.size()) r.fail("payload entity index out of range");
      if (lang >= trie.lang_names_.size()) r.fail("payload language index out of range");
      if (redirect > 1) r.fail("bad redirect flag");
      entry.entity = static_cast<std::uint32_t>(entity);
      entry.lang = static_cast<std::uint32_t>(lang);
      entry.is_redirect = static_cast<std::uint8_t>(redirect);
      entries.push_back(entry);
    }
    trie.payloads_.push_back(std::move(entries));
  }

  const std::uint64_t node_count = r.varint();
  const std::uint64_t name_count = r.varint();
  if (node_count == 0) r.fail("node count must include the root");
  trie.name_count_ = name_count;

  trie.nodes_.clear();
  trie.nodes_.reserve(node_count);

  // The stream is the same preorder walk the serializer emits: read a node
  // header, then its children recursively. A frame tracks which child of a
  // partially read node comes next so sibling links can be stitched in.
  struct Frame {
    std::uint32_t slot;
    std::vector<TokenId> child_tokens;
    std::size_t next_child = 0;
    std::uint32_t last_child = kNil;
  };

  std::uint64_t terminals = 0;
  const auto read_node = [&](TokenId token) {
    if (trie.nodes_.size() >= node_count) r.fail("more nodes than declared");
    Node node;
    node.token = token;
    const std::uint64_t payload_ref = r.varint();
    if (payload_ref > trie.payloads_.size()) r.fail("payload index out of range");
    if (payload_ref != 0) {
      if (trie.nodes_.empty()) r.fail("root cannot be terminal");
      node.payload = static_cast<std::uint32_t>(payload_ref - 1);
      ++terminals;
    }
    const std::uint64_t child_count = r.varint();
    Frame frame;
    frame.slot = static_cast<std::uint32_t>(trie.nodes_.size());
    frame.child_tokens.reserve(child_count);
    TokenId prev = 0;
    for (std::uint64_t i = 0; i < child_count; ++i) {
      const std::uint64_t delta = r.varint();
      const std::uint64_t value = (i == 0) ? delta : prev + delta + 1;
      if (value < kTokenOffset || value > 0x10FFFF + kTokenOffset) r.fail("token out of range");
      frame.child_tokens.push_back(static_cast<TokenId>(value));
      prev = static_cast<TokenId>(value);
    }
    trie.nodes_.push_back(node);
    return frame;
  };

  std::vector<Frame> stack;
  stack.push_back(read_node(0));
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next_child == top.child_tokens.size()) {
      stack.pop_back();
      continue;
    }
    const TokenId token = top.child_tokens[top.next_child++];
    Frame child = read_node(token);
    if (top.last_child == kNil) {
      trie.nodes_[top.slot].first_child = child.slot;
    } else {
      trie.nodes_[top.last_child].next_sibling = child.slot;
    }
    top.last_child = child.slot;
    stack.push_back(std::move(child));  // invalidates `top`
  }

  if (trie.nodes_.size() != node_count) r.fail("fewer nodes than declared");
  if (terminals != trie.payloads_.size()) r.fail("terminal/payload count mismatch");
  if (terminals != name_count) r.fail("name count mismatch");
  r.expect_eof();
  return trie;
}

bool Trie::operator==(const Trie& other) const {
  return nodes_ == other.nodes_ && payloads_ == other.payloads_ &&
         entity_names_ == other.entity_names_ && lang_names_ == other.lang_names_ &&
         name_count_ == other.name_count_ && mode_ == other.mode_ &&
         redirects_included_ == other.redirects_included_;
}

namespace {

template <typename EntityRange>
Trie build_trie_over(const KnowledgeBase& kb, const EntityRange& ids, RenderMode mode,
                     bool include_redirects) {
  Trie::Builder builder;
  builder.set_provenance(mode, include_redirects);
  for (const EntityId& id : ids) {
    if (mode == RenderMode::kCanonical) {
      const auto [lang, name] = kb.canonical_name(id);
      builder.insert(tokenize(render(lang, name, mode)), id, lang, false);
      continue;
    }
    const EntityRecord& record = kb.entity(id);
    for (const auto& [lang, name] : record.names) {
      builder.insert(tokenize(render(lang, name, mode)), id, lang, false);
    }
    if (include_redirects) {
      for (const auto& [lang, aliases] : record.redirects) {
        for (const std::string& alias : aliases) {
          builder.insert(tokenize(render(lang, alias, mode)), id, lang, true);
        }
      }
    }
  }
  return std::move(builder).build();
}

struct EntityKeyRange {
  const std::map<EntityId, EntityRecord>& entities;
  struct Iterator {
    std::map<EntityId, EntityRecord>::const_iterator it;
    const EntityId& operator*() const { return it->first; }
    Iterator& operator++() {
      ++it;
      return *this;
    }
    bool operator!=(const Iterator& other) const { return it != other.it; }
  };
  Iterator begin() const { return {entities.begin()}; }
  Iterator end() const { return {entities.end()}; }
};

}  // namespace

Trie build_kb_trie(const KnowledgeBase& kb, RenderMode mode, bool include_redirects) {
  return build_trie_over(kb, EntityKeyRange{kb.entities()}, mode, include_redirects);
}

Trie restrict_to_candidates(const KnowledgeBase& kb, const std::set<EntityId>& candidates,
                            RenderMode mode, bool include_redirects) {
  for (const EntityId& id : candidates) {
    if (!kb.contains(id)) throw UnknownEntity(id);
  }
  return build_trie_over(kb, candidates, mode, include_redirects);
}

}  // namespace mel
