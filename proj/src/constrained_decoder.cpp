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

#include "mel/constrained_decoder.hpp"

#include <algorithm>
#include <cmath>

namespace mel {

namespace {

double ranked_score(double logprob, std::size_t generated_len, double length_penalty) {
  return logprob / std::pow(static_cast<double>(generated_len), length_penalty);
}

bool lex_less(const TokenSequence& a, const TokenSequence& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::vector<ScoredHypothesis> beam_search(const Scorer& scorer, const Trie& trie,
                                          const ScorerInput& input, const BeamConfig& cfg) {
  if (trie.empty()) throw EmptyTrie();
  if (cfg.beams < 1) throw std::invalid_argument("beams must be positive");
  if (cfg.max_steps < 1) throw std::invalid_argument("max_steps must be positive");
  if (cfg.length_penalty < 0.0) throw std::invalid_argument("length_penalty must be >= 0");

  const auto beams = static_cast<std::size_t>(cfg.beams);
  std::vector<Hypothesis> live{Hypothesis{}};
  std::vector<Hypothesis> finished;

  for (int step = 0; step < cfg.max_steps && !live.empty(); ++step) {
    std::vector<Hypothesis> candidates;
    for (const Hypothesis& h : live) {
      const std::vector<TokenId> allowed = trie.allowed_next(h.tokens);
      if (allowed.empty()) continue;  // cannot happen for live paths, kept for safety
      const LogDistribution dist = scorer.next_logprobs(input, h.tokens);
      for (TokenId token : allowed) {
        const auto lp = dist.find(token);
        if (!lp || std::isinf(*lp)) continue;  // masked: no probability mass
        if (token == kEosToken) {
          finished.push_back(Hypothesis{h.tokens, h.logprob + *lp, true});
        } else {
          Hypothesis next;
          next.tokens = h.tokens;
          next.tokens.push_back(token);
          next.logprob = h.logprob + *lp;
          candidates.push_back(std::move(next));
        }
      }
    }
    // Keep the k best live candidates by cumulative logprob; lexicographic
    // tie-break keeps pruning deterministic.
    if (candidates.size() > beams) {
      std::sort(candidates.begin(), candidates.end(), [](const Hypothesis& a, const Hypothesis& b) {
        if (a.logprob != b.logprob) return a.logprob > b.logprob;
        return lex_less(a.tokens, b.tokens);
      });
      candidates.resize(beams);
    }
    live = std::move(candidates);
  }

  std::vector<ScoredHypothesis> out;
  out.reserve(finished.size());
  for (Hypothesis& h : finished) {
    const std::size_t len = h.tokens.size() + 1;  // generated tokens incl. EOS
    const double score = ranked_score(h.logprob, len, cfg.length_penalty);
    out.push_back(ScoredHypothesis{std::move(h), score});
  }
  std::sort(out.begin(), out.end(), [](const ScoredHypothesis& a, const ScoredHypothesis& b) {
    if (a.ranked_score != b.ranked_score) return a.ranked_score > b.ranked_score;
    return lex_less(a.hypothesis.tokens, b.hypothesis.tokens);
  });
  if (out.size() > beams) out.resize(beams);
  return out;
}

std::vector<std::pair<TokenSequence, double>> exhaustive_rank(
    const Scorer& scorer, const std::vector<TokenSequence>& identifiers,
    const ScorerInput& input, double length_penalty, std::size_t bound) {
  if (identifiers.size() > bound) throw TooManyIdentifiers(identifiers.size(), bound);

  struct Row {
    TokenSequence tokens;
    double logprob;
    double ranked;
  };
  std::vector<Row> rows;
  rows.reserve(identifiers.size());
  for (const TokenSequence& id : identifiers) {
    const double logprob = scorer.sequence_logprob(input, id);
    rows.push_back(Row{id, logprob, ranked_score(logprob, id.size() + 1, length_penalty)});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.ranked != b.ranked) return a.ranked > b.ranked;
    return lex_less(a.tokens, b.tokens);
  });
  std::vector<std::pair<TokenSequence, double>> out;
  out.reserve(rows.size());
  for (Row& row : rows) out.emplace_back(std::move(row.tokens), row.logprob);
  return out;
}

}  // namespace mel
