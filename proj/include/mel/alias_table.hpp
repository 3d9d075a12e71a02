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
#include <string>
#include <vector>

#include "mel/errors.hpp"
#include "mel/kb_store.hpp"
#include "mel/types.hpp"

namespace mel {

// Where an alias entry came from; a single (mention, entity) pair can carry
// several sources.
enum AliasSource : std::uint8_t {
  kAliasFromTraining = 1 << 0,
  kAliasFromTitle = 1 << 1,
  kAliasFromRedirect = 1 << 2,
  kAliasFromLabelAlias = 1 << 3,
};

struct AliasCandidate {
  EntityId entity;
  std::uint64_t count = 0;  // training occurrences; 0 for non-training entries
  std::uint8_t sources = 0;
};

// Exact-match mention -> candidate-entity table. Lookups and construction
// normalize to NFC; there is no case folding or fuzzy matching. Candidate
// lists are sorted by count descending, then entity id. Immutable once
// built.
class AliasTable {
 public:
  // Counts training mentions, then injects every KB primary name and
  // redirect plus the extra labels with count 0 (deduplicated against
  // existing entries for the same entity). Throws UnknownEntity when a
  // mention or label references an entity outside the KB.
  static AliasTable build(const std::vector<std::pair<std::string, EntityId>>& training_mentions,
                          const KnowledgeBase& kb,
                          const std::vector<std::pair<std::string, EntityId>>& extra_labels = {});

  // Stored candidates for the mention, truncated to top_k when given.
  std::vector<AliasCandidate> candidates(const std::string& mention,
                                         std::optional<std::size_t> top_k = std::nullopt) const;

  // Total training occurrences of the mention string (all entities).
  std::uint64_t mention_count(const std::string& mention) const;

  std::size_t size() const { return index_.size(); }

  // JSONL round-trip: {"mention": str, "candidates": [[qid, count], ...]}.
  // Provenance flags are an in-memory aid and not part of the file format.
  void save_jsonl(std::ostream& out) const;
  static AliasTable load_jsonl(std::istream& in);

 private:
  std::map<std::string, std::vector<AliasCandidate>> index_;
};

// Mention/entity pairs for AliasTable::build, read from the training
// mentions TSV (lang, left, mention, right, gold). Lines without a gold are
// skipped; malformed lines throw MalformedLine.
std::vector<std::pair<std::string, EntityId>> read_training_mentions(std::istream& in);

}  // namespace mel
