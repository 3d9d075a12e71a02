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

#include <cstddef>
#include <vector>

#include "mel/errors.hpp"
#include "mel/prefix_trie.hpp"
#include "mel/scorer.hpp"
#include "mel/types.hpp"

namespace mel {

struct BeamConfig {
  int beams = 10;
  double length_penalty = 1.0;
  int max_steps = 32;
};

// A complete or partial decoding candidate. `tokens` excludes EOS; the
// cumulative logprob includes the EOS factor once finished.
struct Hypothesis {
  TokenSequence tokens;
  double logprob = 0.0;
  bool finished = false;
};

struct ScoredHypothesis {
  Hypothesis hypothesis;
  double ranked_score = 0.0;  // logprob / len^length_penalty, len counts EOS
};

// Beam search over the trie-constrained token space. Each step expands live
// beams only over the trie's allowed tokens, scored by the unconstrained
// scorer probabilities (no renormalization over the allowed set). Finished
// hypotheses are ranked by length-normalized score, ties broken by
// lexicographic token sequence; at most cfg.beams are returned. Hypotheses
// still unfinished after max_steps generated tokens are dropped.
std::vector<ScoredHypothesis> beam_search(const Scorer& scorer, const Trie& trie,
                                          const ScorerInput& input, const BeamConfig& cfg = {});

// Scores every identifier with sequence_logprob and sorts with exactly the
// beam_search rule (normalized by len^length_penalty, lexicographic ties).
// The independent route for validating beam_search at desk scale; refuses
// lists above `bound`.
std::vector<std::pair<TokenSequence, double>> exhaustive_rank(
    const Scorer& scorer, const std::vector<TokenSequence>& identifiers,
    const ScorerInput& input, double length_penalty = 1.0, std::size_t bound = 10000);

}  // namespace mel
