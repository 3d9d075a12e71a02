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

#include <optional>
#include <string>
#include <vector>

#include "mel/alias_table.hpp"
#include "mel/constrained_decoder.hpp"
#include "mel/corpus.hpp"
#include "mel/errors.hpp"
#include "mel/kb_store.hpp"
#include "mel/prefix_trie.hpp"
#include "mel/scorer.hpp"

namespace mel {

struct LinkConfig {
  RenderMode mode = RenderMode::kNameFirst;
  bool use_candidates = false;
  bool use_marginalization = false;
  double alpha = 0.5;
  BeamConfig beam;
  int max_input_tokens = kDefaultMaxInputTokens;
  std::optional<std::size_t> candidate_top_k;  // nullopt keeps the full list
  bool include_redirects = true;               // for candidate-restricted tries
};

// One identifier hypothesis backing an entity's score.
struct SupportingIdentifier {
  std::string identifier;  // rendered string
  double logprob = 0.0;    // raw cumulative logprob incl. EOS
  std::size_t length = 0;  // generated tokens incl. EOS
};

struct EntityScore {
  EntityId entity;
  double score = 0.0;
  std::vector<SupportingIdentifier> supporting;
};

// N-to-1 lookup: maps each finished hypothesis to its payload entities; an
// entity scores the best ranked_score among its hypotheses. Homograph
// payloads surface every entity rather than guessing. Sorted by score
// descending, ties by entity id. Output is independent of input order.
std::vector<EntityScore> rank_plain(const std::vector<ScoredHypothesis>& hypotheses,
                                    const Trie& trie);

// Language marginalization over the beam: each entity scores
// logsumexp over its hypotheses of logprob / length^alpha. With alpha = 0
// this is a plain sum of sequence probabilities in log space.
std::vector<EntityScore> rank_marginalized(const std::vector<ScoredHypothesis>& hypotheses,
                                           const Trie& trie, double alpha);

struct LinkResult {
  EntityId prediction;
  std::vector<EntityScore> ranking;
  bool used_candidates = false;
};

// Full pipeline for one mention: optional alias-table candidate restriction
// (falling back to the full trie when the table has no candidates),
// trie-constrained beam search, then plain or marginalized ranking.
LinkResult link(const MentionInstance& inst, const KnowledgeBase& kb, const Trie& full_trie,
                const AliasTable* alias, const Scorer& scorer, const LinkConfig& cfg);

}  // namespace mel
