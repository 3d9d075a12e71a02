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
#include <utility>
#include <vector>

#include "mel/errors.hpp"
#include "mel/identifier_codec.hpp"
#include "mel/kb_store.hpp"
#include "mel/scorer.hpp"
#include "mel/types.hpp"

namespace mel {

inline constexpr int kDefaultMaxInputTokens = 128;
inline constexpr std::string_view kMentionStartMarker = "[START]";
inline constexpr std::string_view kMentionEndMarker = "[END]";

// One linking instance: a mention in its context, optionally with the gold
// entity for training or evaluation.
struct MentionInstance {
  LanguageCode lang;
  std::string left;
  std::string mention;
  std::string right;
  std::optional<EntityId> gold;
};

// A hyperlink whose target page title still needs to be resolved to an
// entity.
struct RawHyperlink {
  LanguageCode lang;
  std::string left;
  std::string mention;
  std::string right;
  std::string target_title;
};

struct AlignmentStats {
  std::uint64_t direct = 0;         // title matched a primary name in-language
  std::uint64_t via_redirect = 0;   // resolved through the redirect table
  std::uint64_t via_search = 0;     // unique match across all labels
  std::uint64_t dropped_ambiguous = 0;
  std::uint64_t dropped_unresolved = 0;
};

// Key of the redirect TSV: (language, source title) -> canonical title.
using RedirectMap = std::map<std::pair<LanguageCode, std::string>, std::string>;

// Mentions TSV: lang \t left \t mention \t right \t gold (gold may be
// empty). UTF-8, NFC-normalized on read, no header. Throws MalformedLine.
std::vector<MentionInstance> load_mentions(std::istream& in);

// Hyperlinks TSV: lang \t left \t mention \t right \t target_title.
std::vector<RawHyperlink> load_hyperlinks(std::istream& in);

// Redirects TSV: lang \t from_title \t to_title.
RedirectMap load_redirects(std::istream& in);

// Resolves hyperlinks to mention instances: (1) the title as a primary name
// in the link's language, (2) the redirect table then primary lookup,
// (3) a search across all names and redirects in all languages, kept only
// when it is unambiguous. Unresolved and ambiguous links are dropped and
// counted, not errors.
std::pair<std::vector<MentionInstance>, AlignmentStats> align_hyperlinks(
    const std::vector<RawHyperlink>& links, const KnowledgeBase& kb,
    const RedirectMap& redirects);

// Marks the mention span as "left [START] mention [END] right" and
// tokenizes. When the result exceeds max_tokens, left and right are trimmed
// alternately from their outer ends (left first) until it fits; the mention
// and markers are never trimmed. Throws MentionTooLong when the mention plus
// markers alone exceed the budget.
ScorerInput build_input(const MentionInstance& inst, int max_tokens = kDefaultMaxInputTokens);

// Ground-truth targets for scorer training. An instance whose gold entity
// has a name in the instance's language yields one pair targeting that name;
// otherwise up to five alternative languages are sampled without replacement
// (seeded, reproducible) and each yields a pair. Instances without gold are
// skipped.
std::vector<std::pair<ScorerInput, TokenSequence>> training_pairs(
    const std::vector<MentionInstance>& instances, const KnowledgeBase& kb, RenderMode mode,
    std::uint64_t rng_seed, int max_tokens = kDefaultMaxInputTokens);

}  // namespace mel
