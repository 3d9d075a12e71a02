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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mel/errors.hpp"
#include "mel/types.hpp"

namespace mel {

// A KB entity: per-language primary names, per-language redirect aliases,
// and per-language training mention counts. Counts may exist for languages
// without a name; canonical selection ignores those.
struct EntityRecord {
  EntityId id;
  std::map<LanguageCode, std::string> names;
  std::map<LanguageCode, std::set<std::string>> redirects;
  std::map<LanguageCode, std::uint64_t> mention_counts;

  // Classes this entity instantiates or subclasses, pre-flattened by the
  // data producer. Consumed by the ingest filter, not stored in the KB.
  std::vector<EntityId> classes;
};

// Immutable after ingest; safe to share across threads for reads.
class KnowledgeBase {
 public:
  // Builds a KB from records. Records with no names or belonging to an
  // excluded class are dropped. class_memberships augments (and overrides
  // nothing in) the per-record classes field; both feed the same filter.
  static KnowledgeBase ingest(
      std::vector<EntityRecord> records, const std::set<EntityId>& excluded_classes = {},
      const std::map<EntityId, std::set<EntityId>>& class_memberships = {});

  // Name of the language with the most mentions of this entity; ties go to
  // the language with the most mentions KB-wide, then to the smallest code.
  std::pair<LanguageCode, std::string> canonical_name(const EntityId& id) const;

  // Entities having `name` as primary or redirect name. Without a language,
  // the union over all languages. The query is NFC-normalized to match the
  // normalization applied at ingest.
  std::set<EntityId> resolve(const std::string& name,
                             const std::optional<LanguageCode>& lang = std::nullopt) const;

  // Entity whose primary title in `lang` is exactly `name`, if any. Primary
  // titles are unique per language.
  std::optional<EntityId> resolve_primary(const std::string& name,
                                          const LanguageCode& lang) const;

  // All <language, name> pairs naming the entity.
  std::set<std::pair<LanguageCode, std::string>> identifiers(const EntityId& id,
                                                             bool include_redirects) const;

  bool contains(const EntityId& id) const { return entities_.count(id) != 0; }
  const EntityRecord& entity(const EntityId& id) const;
  const std::map<EntityId, EntityRecord>& entities() const { return entities_; }
  const std::map<LanguageCode, std::uint64_t>& global_lang_counts() const {
    return global_lang_counts_;
  }

  // Total training mentions of the entity across all languages.
  std::uint64_t total_mentions(const EntityId& id) const;

  void save(std::ostream& out) const;
  static KnowledgeBase load(std::istream& in);

 private:
  struct NameUse {
    EntityId entity;
    bool is_redirect;
    bool operator<(const NameUse& other) const {
      return std::tie(entity, is_redirect) < std::tie(other.entity, other.is_redirect);
    }
  };

  std::map<EntityId, EntityRecord> entities_;
  std::map<std::pair<std::string, LanguageCode>, std::set<NameUse>> name_index_;
  std::map<LanguageCode, std::uint64_t> global_lang_counts_;
};

// Streams EntityRecords from a JSONL file: one object per line with fields
// {"id", "names", "redirects", "counts"} and an optional "classes" array.
// All strings are NFC-normalized. Throws MalformedRecord with the 1-based
// line number on structural problems.
std::vector<EntityRecord> read_kb_jsonl(std::istream& in);

// Plain-text filter list: one excluded class id per line, '#' comments and
// blank lines skipped.
std::set<EntityId> read_filter_list(std::istream& in);

}  // namespace mel
