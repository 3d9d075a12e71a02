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

#include "mel/alias_table.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "mel/corpus.hpp"
#include "mel/unicode.hpp"

namespace mel {

namespace {

void sort_candidates(std::vector<AliasCandidate>& list) {
  std::sort(list.begin(), list.end(), [](const AliasCandidate& a, const AliasCandidate& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.entity < b.entity;
  });
}

}  // namespace

AliasTable AliasTable::build(
    const std::vector<std::pair<std::string, EntityId>>& training_mentions,
    const KnowledgeBase& kb, const std::vector<std::pair<std::string, EntityId>>& extra_labels) {
  // Accumulate per (mention, entity) first; the sorted index is built once.
  std::map<std::string, std::map<EntityId, AliasCandidate>> staging;

  const auto add = [&](const std::string& mention, const EntityId& entity, std::uint64_t count,
                       std::uint8_t source) {
    if (!kb.contains(entity)) throw UnknownEntity(entity);
    const std::string key = nfc(mention);
    if (key.empty()) return;
    AliasCandidate& slot = staging[key][entity];
    slot.entity = entity;
    slot.count += count;
    slot.sources |= source;
  };

  for (const auto& [mention, entity] : training_mentions) {
    add(mention, entity, 1, kAliasFromTraining);
  }
  for (const auto& [id, record] : kb.entities()) {
    for (const auto& [lang, name] : record.names) {
      (void)lang;
      add(name, id, 0, kAliasFromTitle);
    }
    for (const auto& [lang, aliases] : record.redirects) {
      (void)lang;
      for (const std::string& alias : aliases) add(alias, id, 0, kAliasFromRedirect);
    }
  }
  for (const auto& [label, entity] : extra_labels) {
    add(label, entity, 0, kAliasFromLabelAlias);
  }

  AliasTable table;
  for (auto& [mention, per_entity] : staging) {
    std::vector<AliasCandidate> list;
    list.reserve(per_entity.size());
    for (auto& [entity, candidate] : per_entity) {
      (void)entity;
      list.push_back(std::move(candidate));
    }
    sort_candidates(list);
    table.index_.emplace(mention, std::move(list));
  }
  return table;
}

std::vector<AliasCandidate> AliasTable::candidates(const std::string& mention,
                                                   std::optional<std::size_t> top_k) const {
  const auto it = index_.find(nfc(mention));
  if (it == index_.end()) return {};
  if (!top_k || *top_k >= it->second.size()) return it->second;
  return std::vector<AliasCandidate>(it->second.begin(),
                                     it->second.begin() + static_cast<std::ptrdiff_t>(*top_k));
}

std::uint64_t AliasTable::mention_count(const std::string& mention) const {
  const auto it = index_.find(nfc(mention));
  if (it == index_.end()) return 0;
  std::uint64_t total = 0;
  for (const AliasCandidate& candidate : it->second) total += candidate.count;
  return total;
}

void AliasTable::save_jsonl(std::ostream& out) const {
  for (const auto& [mention, list] : index_) {
    nlohmann::json candidates = nlohmann::json::array();
    for (const AliasCandidate& candidate : list) {
      candidates.push_back({candidate.entity.value(), candidate.count});
    }
    const nlohmann::json line = {{"mention", mention}, {"candidates", candidates}};
    out << line.dump() << '\n';
  }
}

AliasTable AliasTable::load_jsonl(std::istream& in) {
  AliasTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedLine(line_no, e.what());
    }
    if (!obj.is_object() || !obj.contains("mention") || !obj.contains("candidates") ||
        !obj["mention"].is_string() || !obj["candidates"].is_array()) {
      throw MalformedLine(line_no, "expected {\"mention\", \"candidates\"}");
    }
    std::vector<AliasCandidate> list;
    for (const auto& item : obj["candidates"]) {
      if (!item.is_array() || item.size() != 2 || !item[0].is_string() ||
          !item[1].is_number_unsigned()) {
        throw MalformedLine(line_no, "candidate must be [qid, count]");
      }
      AliasCandidate candidate;
      candidate.entity = EntityId(item[0].get<std::string>());
      candidate.count = item[1].get<std::uint64_t>();
      list.push_back(std::move(candidate));
    }
    sort_candidates(list);
    table.index_[nfc(obj["mention"].get<std::string>())] = std::move(list);
  }
  return table;
}

std::vector<std::pair<std::string, EntityId>> read_training_mentions(std::istream& in) {
  std::vector<std::pair<std::string, EntityId>> out;
  for (const MentionInstance& inst : load_mentions(in)) {
    if (inst.gold) out.emplace_back(inst.mention, *inst.gold);
  }
  return out;
}

}  // namespace mel
