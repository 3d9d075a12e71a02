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

#include "mel/kb_store.hpp"

#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "mel/binary_io.hpp"
#include "mel/unicode.hpp"

namespace mel {

namespace {
constexpr std::string_view kKbTag = "MELKB001";
}  // namespace

KnowledgeBase KnowledgeBase::ingest(
    std::vector<EntityRecord> records, const std::set<EntityId>& excluded_classes,
    const std::map<EntityId, std::set<EntityId>>& class_memberships) {
  KnowledgeBase kb;
  for (EntityRecord& record : records) {
    if (record.names.empty()) continue;

    bool excluded = false;
    for (const EntityId& cls : record.classes) {
      if (excluded_classes.count(cls)) {
        excluded = true;
        break;
      }
    }
    if (!excluded) {
      if (auto it = class_memberships.find(record.id); it != class_memberships.end()) {
        for (const EntityId& cls : it->second) {
          if (excluded_classes.count(cls)) {
            excluded = true;
            break;
          }
        }
      }
    }
    if (excluded) continue;

    const EntityId id = record.id;
    if (kb.entities_.count(id)) throw DuplicateEntity(id);

    // Redirects that duplicate the primary title add nothing; drop them so
    // the record invariant holds even for sloppy producers.
    for (auto& [lang, aliases] : record.redirects) {
      if (auto it = record.names.find(lang); it != record.names.end()) aliases.erase(it->second);
    }

    for (const auto& [lang, count] : record.mention_counts) {
      kb.global_lang_counts_[lang] += count;
    }
    for (const auto& [lang, name] : record.names) {
      kb.name_index_[{name, lang}].insert(NameUse{id, false});
    }
    for (const auto& [lang, aliases] : record.redirects) {
      for (const std::string& alias : aliases) {
        kb.name_index_[{alias, lang}].insert(NameUse{id, true});
      }
    }
    record.classes.clear();
    kb.entities_.emplace(id, std::move(record));
  }
  return kb;
}

const EntityRecord& KnowledgeBase::entity(const EntityId& id) const {
  const auto it = entities_.find(id);
  if (it == entities_.end()) throw UnknownEntity(id);
  return it->second;
}

std::pair<LanguageCode, std::string> KnowledgeBase::canonical_name(const EntityId& id) const {
  const EntityRecord& record = entity(id);
  const LanguageCode* best = nullptr;
  std::uint64_t best_own = 0;
  std::uint64_t best_global = 0;
  for (const auto& [lang, name] : record.names) {
    std::uint64_t own = 0;
    if (auto it = record.mention_counts.find(lang); it != record.mention_counts.end()) {
      own = it->second;
    }
    std::uint64_t global = 0;
    if (auto it = global_lang_counts_.find(lang); it != global_lang_counts_.end()) {
      global = it->second;
    }
    // Iteration is in ascending language order, so strict improvement keeps
    // the lexicographically smallest code on full ties.
    if (best == nullptr || own > best_own || (own == best_own && global > best_global)) {
      best = &lang;
      best_own = own;
      best_global = global;
    }
  }
  return {*best, record.names.at(*best)};
}

std::set<EntityId> KnowledgeBase::resolve(const std::string& name,
                                          const std::optional<LanguageCode>& lang) const {
  const std::string normalized = nfc(name);
  std::set<EntityId> out;
  if (lang) {
    if (auto it = name_index_.find({normalized, *lang}); it != name_index_.end()) {
      for (const NameUse& use : it->second) out.insert(use.entity);
    }
    return out;
  }
  // Union over all languages: scan the contiguous range of keys sharing the
  // name component.
  for (auto it = name_index_.lower_bound({normalized, LanguageCode()});
       it != name_index_.end() && it->first.first == normalized; ++it) {
    for (const NameUse& use : it->second) out.insert(use.entity);
  }
  return out;
}

std::optional<EntityId> KnowledgeBase::resolve_primary(const std::string& name,
                                                       const LanguageCode& lang) const {
  const auto it = name_index_.find({nfc(name), lang});
  if (it == name_index_.end()) return std::nullopt;
  for (const NameUse& use : it->second) {
    if (!use.is_redirect) return use.entity;
  }
  return std::nullopt;
}

std::set<std::pair<LanguageCode, std::string>> KnowledgeBase::identifiers(
    const EntityId& id, bool include_redirects) const {
  const EntityRecord& record = entity(id);
  std::set<std::pair<LanguageCode, std::string>> out;
  for (const auto& [lang, name] : record.names) out.emplace(lang, name);
  if (include_redirects) {
    for (const auto& [lang, aliases] : record.redirects) {
      for (const std::string& alias : aliases) out.emplace(lang, alias);
    }
  }
  return out;
}

std::uint64_t KnowledgeBase::total_mentions(const EntityId& id) const {
  const auto it = entities_.find(id);
  if (it == entities_.end()) return 0;
  std::uint64_t total = 0;
  for (const auto& [lang, count] : it->second.mention_counts) total += count;
  return total;
}

void KnowledgeBase::save(std::ostream& out) const {
  BinaryWriter w(out);
  w.tag(kKbTag);
  w.varint(entities_.size());
  for (const auto& [id, record] : entities_) {
    w.string(id.value());
    w.varint(record.names.size());
    for (const auto& [lang, name] : record.names) {
      w.string(lang.value());
      w.string(name);
    }
    w.varint(record.redirects.size());
    for (const auto& [lang, aliases] : record.redirects) {
      w.string(lang.value());
      w.varint(aliases.size());
      for (const std::string& alias : aliases) w.string(alias);
    }
    w.varint(record.mention_counts.size());
    for (const auto& [lang, count] : record.mention_counts) {
      w.string(lang.value());
      w.varint(count);
    }
  }
}

KnowledgeBase KnowledgeBase::load(std::istream& in) {
  BinaryReader r(in, "kb");
  r.expect_tag(kKbTag);
  std::vector<EntityRecord> records;
  const std::uint64_t entity_count = r.varint();
  records.reserve(entity_count);
  try {
    for (std::uint64_t i = 0; i < entity_count; ++i) {
      EntityRecord record;
      record.id = EntityId(r.string());
      const std::uint64_t name_count = r.varint();
      for (std::uint64_t k = 0; k < name_count; ++k) {
        LanguageCode lang(r.string());
        record.names[lang] = r.string();
      }
      const std::uint64_t redirect_langs = r.varint();
      for (std::uint64_t k = 0; k < redirect_langs; ++k) {
        LanguageCode lang(r.string());
        const std::uint64_t alias_count = r.varint();
        auto& aliases = record.redirects[lang];
        for (std::uint64_t a = 0; a < alias_count; ++a) aliases.insert(r.string());
      }
      const std::uint64_t count_langs = r.varint();
      for (std::uint64_t k = 0; k < count_langs; ++k) {
        LanguageCode lang(r.string());
        record.mention_counts[lang] = r.varint();
      }
      records.push_back(std::move(record));
    }
    r.expect_eof();
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
  return ingest(std::move(records));
}

namespace {

std::string normalized_string(const nlohmann::json& value, std::size_t line,
                              const char* context) {
  if (!value.is_string()) {
    throw MalformedRecord(line, std::string(context) + " must be a string");
  }
  try {
    return nfc(value.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw MalformedRecord(line, std::string(context) + ": " + e.what());
  }
}

}  // namespace

std::vector<EntityRecord> read_kb_jsonl(std::istream& in) {
  std::vector<EntityRecord> records;
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
      throw MalformedRecord(line_no, e.what());
    }
    if (!obj.is_object()) throw MalformedRecord(line_no, "expected a JSON object");

    EntityRecord record;
    if (!obj.contains("id")) throw MalformedRecord(line_no, "missing 'id'");
    const std::string id = normalized_string(obj["id"], line_no, "'id'");
    if (id.empty()) throw MalformedRecord(line_no, "'id' must be non-empty");
    record.id = EntityId(id);

    if (obj.contains("names")) {
      if (!obj["names"].is_object()) throw MalformedRecord(line_no, "'names' must be an object");
      for (const auto& [lang, name] : obj["names"].items()) {
        if (!LanguageCode::valid(lang)) {
          throw MalformedRecord(line_no, "invalid language code '" + lang + "'");
        }
        const std::string value = normalized_string(name, line_no, "name");
        if (value.empty()) throw MalformedRecord(line_no, "empty name for language " + lang);
        record.names[LanguageCode(lang)] = value;
      }
    }
    if (obj.contains("redirects")) {
      if (!obj["redirects"].is_object()) {
        throw MalformedRecord(line_no, "'redirects' must be an object");
      }
      for (const auto& [lang, aliases] : obj["redirects"].items()) {
        if (!LanguageCode::valid(lang)) {
          throw MalformedRecord(line_no, "invalid language code '" + lang + "'");
        }
        if (!aliases.is_array()) throw MalformedRecord(line_no, "redirect list must be an array");
        auto& slot = record.redirects[LanguageCode(lang)];
        for (const auto& alias : aliases) {
          const std::string value = normalized_string(alias, line_no, "redirect");
          if (!value.empty()) slot.insert(value);
        }
      }
    }
    if (obj.contains("counts")) {
      if (!obj["counts"].is_object()) throw MalformedRecord(line_no, "'counts' must be an object");
      for (const auto& [lang, count] : obj["counts"].items()) {
        if (!LanguageCode::valid(lang)) {
          throw MalformedRecord(line_no, "invalid language code '" + lang + "'");
        }
        if (!count.is_number_unsigned()) {
          throw MalformedRecord(line_no, "count must be a non-negative integer");
        }
        record.mention_counts[LanguageCode(lang)] = count.get<std::uint64_t>();
      }
    }
    if (obj.contains("classes")) {
      if (!obj["classes"].is_array()) throw MalformedRecord(line_no, "'classes' must be an array");
      for (const auto& cls : obj["classes"]) {
        const std::string value = normalized_string(cls, line_no, "class id");
        if (!value.empty()) record.classes.emplace_back(value);
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::set<EntityId> read_filter_list(std::istream& in) {
  std::set<EntityId> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    const std::string token = line.substr(first, last - first + 1);
    if (token.empty() || token[0] == '#') continue;
    out.insert(EntityId(token));
  }
  return out;
}

}  // namespace mel
