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
#include <span>
#include <utility>
#include <vector>

#include "mel/errors.hpp"
#include "mel/types.hpp"

namespace mel {

// Marked-up linking input: the context with exactly one
// "[START] mention [END]" span, plus the raw mention tokens.
struct ScorerInput {
  TokenSequence context_tokens;
  TokenSequence mention_tokens;
};

// A proper next-token log-distribution over the model's prediction
// vocabulary (which always includes EOS). Entries are natural logs; probes
// outside the vocabulary report absence rather than -inf so callers can
// distinguish "impossible" from "unknown token".
class LogDistribution {
 public:
  explicit LogDistribution(std::vector<std::pair<TokenId, double>> entries)
      : entries_(std::move(entries)) {}

  std::optional<double> find(TokenId token) const;
  const std::vector<std::pair<TokenId, double>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<TokenId, double>> entries_;  // sorted by token
};

// Autoregressive scoring contract: p(next token | context, prefix). The
// trie-constrained decoder and the exhaustive oracle both run against this
// interface, so any model with a token-level conditional fits behind it.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual LogDistribution next_logprobs(const ScorerInput& input,
                                        std::span<const TokenId> prefix) const = 0;

  // Chain-rule sum of stepwise logprobs over `target`, including the
  // terminal EOS factor. Defined only through next_logprobs so the two can
  // never disagree. Throws TokenOutsideVocab for unknown target tokens.
  double sequence_logprob(const ScorerInput& input, std::span<const TokenId> target) const;
};

// Deterministic reference model: a mixture of a copy-affinity component and
// an add-k smoothed bigram model. The copy component finds the longest
// non-empty suffix of the prefix that occurs inside the mention and puts its
// mass on the tokens extending those occurrences (EOS when an occurrence
// reaches the mention's end); when no suffix matches, the step falls back to
// the bigram distribution alone. It stands in for a trained seq2seq model at
// desk scale while exhibiting the same copy bias.
class ReferenceScorer : public Scorer {
 public:
  ReferenceScorer() = default;
  ReferenceScorer(std::map<std::pair<TokenId, TokenId>, std::uint64_t> bigram_counts,
                  std::map<TokenId, std::uint64_t> unigram_counts, std::set<TokenId> vocab,
                  double lambda_copy, double add_k);

  LogDistribution next_logprobs(const ScorerInput& input,
                                std::span<const TokenId> prefix) const override;

  const std::set<TokenId>& vocab() const { return vocab_; }
  double lambda_copy() const { return lambda_copy_; }
  double add_k() const { return add_k_; }
  const std::map<std::pair<TokenId, TokenId>, std::uint64_t>& bigram_counts() const {
    return bigram_counts_;
  }
  const std::map<TokenId, std::uint64_t>& unigram_counts() const { return unigram_counts_; }

  void save(std::ostream& out) const;
  static ReferenceScorer load(std::istream& in);

  bool operator==(const ReferenceScorer&) const = default;

 private:
  void rebuild_prediction_vocab();

  std::map<std::pair<TokenId, TokenId>, std::uint64_t> bigram_counts_;
  std::map<TokenId, std::uint64_t> unigram_counts_;
  std::map<TokenId, std::uint64_t> context_totals_;  // row sums of bigram_counts_
  std::set<TokenId> vocab_;                          // counted tokens + BOS + EOS
  std::vector<TokenId> prediction_vocab_;            // vocab minus BOS, sorted
  double lambda_copy_ = 0.5;
  double add_k_ = 1.0;
};

// Accumulates (BOS->y1, ..., yN->EOS) transition counts over the training
// targets. Inputs ride along untouched; the reference model conditions on
// the mention only. Throws EmptyCorpus when no pairs are given.
ReferenceScorer train_reference(const std::vector<std::pair<ScorerInput, TokenSequence>>& pairs,
                                double lambda_copy = 0.5, double add_k = 1.0);

// Builds a ScorerInput from pre-tokenized parts (test and pipeline helper):
// context = "left [START] mention [END] right" with empty sides skipped.
ScorerInput make_scorer_input(const std::string& left, const std::string& mention,
                              const std::string& right);

}  // namespace mel
