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

#include "mel/entity_ranker.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "mel/identifier_codec.hpp"

namespace mel {

namespace {

struct Contribution {
  SupportingIdentifier support;
  double ranked_score;
};

// Per-entity contributions, one per (hypothesis, entity) pair, gathered in
// canonical identifier order so downstream float accumulation is
// independent of the hypothesis list order.
std::map<EntityId, std::vector<Contribution>> gather(
    const std::vector<ScoredHypothesis>& hypotheses, const Trie& trie) {
  std::map<EntityId, std::vector<Contribution>> out;
  for (const ScoredHypothesis& scored : hypotheses) {
    if (!scored.hypothesis.finished) throw UnfinishedHypothesis();
    const TriePayload entries = trie.payload(scored.hypothesis.tokens);
    SupportingIdentifier support;
    support.identifier = detokenize(scored.hypothesis.tokens);
    support.logprob = scored.hypothesis.logprob;
    support.length = scored.hypothesis.tokens.size() + 1;

    const EntityId* last = nullptr;
    for (const TriePayloadEntry& entry : entries) {
      if (last && entry.entity == *last) continue;  // one term per hypothesis
      out[entry.entity].push_back(Contribution{support, scored.ranked_score});
      last = &entry.entity;
    }
  }
  for (auto& [entity, contributions] : out) {
    (void)entity;
    std::sort(contributions.begin(), contributions.end(),
              [](const Contribution& a, const Contribution& b) {
                return a.support.identifier < b.support.identifier;
              });
  }
  return out;
}

std::vector<EntityScore> finalize(std::map<EntityId, std::vector<Contribution>>&& gathered,
                                  const std::function<double(const std::vector<Contribution>&)>&
                                      score_of) {
  std::vector<EntityScore> out;
  out.reserve(gathered.size());
  for (auto& [entity, contributions] : gathered) {
    EntityScore score;
    score.entity = entity;
    score.score = score_of(contributions);
    score.supporting.reserve(contributions.size());
    for (Contribution& c : contributions) score.supporting.push_back(std::move(c.support));
    out.push_back(std::move(score));
  }
  std::sort(out.begin(), out.end(), [](const EntityScore& a, const EntityScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.entity < b.entity;
  });
  return out;
}

}  // namespace

std::vector<EntityScore> rank_plain(const std::vector<ScoredHypothesis>& hypotheses,
                                    const Trie& trie) {
  return finalize(gather(hypotheses, trie), [](const std::vector<Contribution>& contributions) {
    double best = contributions.front().ranked_score;
    for (const Contribution& c : contributions) best = std::max(best, c.ranked_score);
    return best;
  });
}

std::vector<EntityScore> rank_marginalized(const std::vector<ScoredHypothesis>& hypotheses,
                                           const Trie& trie, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
  return finalize(gather(hypotheses, trie),
                  [alpha](const std::vector<Contribution>& contributions) {
                    // logsumexp over length-normalized sequence logprobs.
                    double max_term = -std::numeric_limits<double>::infinity();
                    std::vector<double> terms;
                    terms.reserve(contributions.size());
                    for (const Contribution& c : contributions) {
                      const double term =
                          c.support.logprob /
                          std::pow(static_cast<double>(c.support.length), alpha);
                      terms.push_back(term);
                      max_term = std::max(max_term, term);
                    }
                    double sum = 0.0;
                    for (double term : terms) sum += std::exp(term - max_term);
                    return max_term + std::log(sum);
                  });
}

LinkResult link(const MentionInstance& inst, const KnowledgeBase& kb, const Trie& full_trie,
                const AliasTable* alias, const Scorer& scorer, const LinkConfig& cfg) {
  const ScorerInput input = build_input(inst, cfg.max_input_tokens);

  const Trie* trie = &full_trie;
  Trie restricted;
  bool used_candidates = false;
  if (cfg.use_candidates && alias != nullptr) {
    const std::vector<AliasCandidate> candidates =
        alias->candidates(inst.mention, cfg.candidate_top_k);
    if (!candidates.empty()) {
      std::set<EntityId> ids;
      for (const AliasCandidate& candidate : candidates) ids.insert(candidate.entity);
      restricted = restrict_to_candidates(kb, ids, cfg.mode, cfg.include_redirects);
      trie = &restricted;
      used_candidates = true;
    }
  }

  const std::vector<ScoredHypothesis> hypotheses = beam_search(scorer, *trie, input, cfg.beam);
  if (hypotheses.empty()) throw NoHypotheses();

  std::vector<EntityScore> ranking = cfg.use_marginalization
                                         ? rank_marginalized(hypotheses, *trie, cfg.alpha)
                                         : rank_plain(hypotheses, *trie);
  LinkResult result;
  result.prediction = ranking.front().entity;
  result.ranking = std::move(ranking);
  result.used_candidates = used_candidates;
  return result;
}

}  // namespace mel
