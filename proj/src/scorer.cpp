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

#include "mel/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "mel/binary_io.hpp"
#include "mel/identifier_codec.hpp"

namespace mel {

namespace {
constexpr std::string_view kScorerTag = "MELSC001";
}  // namespace

std::optional<double> LogDistribution::find(TokenId token) const {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), token,
      [](const std::pair<TokenId, double>& e, TokenId t) { return e.first < t; });
  if (it == entries_.end() || it->first != token) return std::nullopt;
  return it->second;
}

double Scorer::sequence_logprob(const ScorerInput& input,
                                std::span<const TokenId> target) const {
  double total = 0.0;
  for (std::size_t i = 0; i <= target.size(); ++i) {
    const LogDistribution dist = next_logprobs(input, target.subspan(0, i));
    const TokenId next = (i == target.size()) ? kEosToken : target[i];
    const auto lp = dist.find(next);
    if (!lp) throw TokenOutsideVocab(next);
    total += *lp;
  }
  return total;
}

ReferenceScorer::ReferenceScorer(
    std::map<std::pair<TokenId, TokenId>, std::uint64_t> bigram_counts,
    std::map<TokenId, std::uint64_t> unigram_counts, std::set<TokenId> vocab,
    double lambda_copy, double add_k)
    : bigram_counts_(std::move(bigram_counts)),
      unigram_counts_(std::move(unigram_counts)),
      vocab_(std::move(vocab)),
      lambda_copy_(lambda_copy),
      add_k_(add_k) {
  if (lambda_copy_ < 0.0 || lambda_copy_ > 1.0) {
    throw std::invalid_argument("lambda_copy must lie in [0, 1]");
  }
  if (!(add_k_ > 0.0)) throw std::invalid_argument("add_k must be positive");
  vocab_.insert(kEosToken);
  for (const auto& [pair, count] : bigram_counts_) {
    vocab_.insert(pair.first);
    vocab_.insert(pair.second);
    context_totals_[pair.first] += count;
  }
  for (const auto& [token, count] : unigram_counts_) {
    (void)count;
    vocab_.insert(token);
  }
  rebuild_prediction_vocab();
}

void ReferenceScorer::rebuild_prediction_vocab() {
  prediction_vocab_.clear();
  for (TokenId t : vocab_) {
    if (t != kBosToken && t != kPadToken) prediction_vocab_.push_back(t);
  }
}

LogDistribution ReferenceScorer::next_logprobs(const ScorerInput& input,
                                               std::span<const TokenId> prefix) const {
  if (prediction_vocab_.empty()) throw UntrainedModel();
  const double vocab_size = static_cast<double>(prediction_vocab_.size());

  // Copy component: longest non-empty suffix of the prefix occurring inside
  // the mention; each occurrence contributes the token that extends it, or
  // EOS when the occurrence touches the mention's end.
  std::set<TokenId> extensions;
  const TokenSequence& mention = input.mention_tokens;
  const std::size_t max_len = std::min(prefix.size(), mention.size());
  for (std::size_t len = max_len; len > 0 && extensions.empty(); --len) {
    const std::span<const TokenId> suffix = prefix.subspan(prefix.size() - len);
    for (std::size_t pos = 0; pos + len <= mention.size(); ++pos) {
      if (!std::equal(suffix.begin(), suffix.end(), mention.begin() + pos)) continue;
      const std::size_t end = pos + len;
      extensions.insert(end < mention.size() ? mention[end] : kEosToken);
    }
  }
  const double lambda = extensions.empty() ? 0.0 : lambda_copy_;
  const double copy_denom = static_cast<double>(extensions.size()) + add_k_ * vocab_size;

  const TokenId context = prefix.empty() ? kBosToken : prefix.back();
  double context_total = 0.0;
  if (const auto it = context_totals_.find(context); it != context_totals_.end()) {
    context_total = static_cast<double>(it->second);
  }
  const double bigram_denom = context_total + add_k_ * vocab_size;

  std::vector<std::pair<TokenId, double>> entries;
  entries.reserve(prediction_vocab_.size());
  for (TokenId token : prediction_vocab_) {
    double bigram_count = 0.0;
    if (const auto it = bigram_counts_.find({context, token}); it != bigram_counts_.end()) {
      bigram_count = static_cast<double>(it->second);
    }
    const double p_bigram = (bigram_count + add_k_) / bigram_denom;
    double p = (1.0 - lambda) * p_bigram;
    if (lambda > 0.0) {
      const double hit = extensions.count(token) ? 1.0 : 0.0;
      p += lambda * ((hit + add_k_) / copy_denom);
    }
    entries.emplace_back(token, std::log(p));
  }
  return LogDistribution(std::move(entries));
}

ReferenceScorer train_reference(const std::vector<std::pair<ScorerInput, TokenSequence>>& pairs,
                                double lambda_copy, double add_k) {
  if (pairs.empty()) throw EmptyCorpus();
  std::map<std::pair<TokenId, TokenId>, std::uint64_t> bigrams;
  std::map<TokenId, std::uint64_t> unigrams;
  std::set<TokenId> vocab{kBosToken, kEosToken};
  for (const auto& [input, target] : pairs) {
    (void)input;
    TokenId prev = kBosToken;
    for (TokenId token : target) {
      if (token < kTokenOffset) throw ReservedTokenInSequence(token);
      ++bigrams[{prev, token}];
      ++unigrams[token];
      vocab.insert(token);
      prev = token;
    }
    ++bigrams[{prev, kEosToken}];
    ++unigrams[kEosToken];
  }
  return ReferenceScorer(std::move(bigrams), std::move(unigrams), std::move(vocab), lambda_copy,
                         add_k);
}

void ReferenceScorer::save(std::ostream& out) const {
  BinaryWriter w(out);
  w.tag(kScorerTag);
  w.f64(lambda_copy_);
  w.f64(add_k_);
  w.varint(vocab_.size());
  for (TokenId t : vocab_) w.varint(t);
  w.varint(unigram_counts_.size());
  for (const auto& [token, count] : unigram_counts_) {
    w.varint(token);
    w.varint(count);
  }
  w.varint(bigram_counts_.size());
  for (const auto& [pair, count] : bigram_counts_) {
    w.varint(pair.first);
    w.varint(pair.second);
    w.varint(count);
  }
}

ReferenceScorer ReferenceScorer::load(std::istream& in) {
  BinaryReader r(in, "scorer");
  r.expect_tag(kScorerTag);
  const double lambda_copy = r.f64();
  const double add_k = r.f64();
  if (lambda_copy < 0.0 || lambda_copy > 1.0) r.fail("lambda_copy out of range");
  if (!(add_k > 0.0)) r.fail("add_k out of range");

  std::set<TokenId> vocab;
  const std::uint64_t vocab_size = r.varint();
  for (std::uint64_t i = 0; i < vocab_size; ++i) vocab.insert(static_cast<TokenId>(r.varint()));
  std::map<TokenId, std::uint64_t> unigrams;
  const std::uint64_t unigram_count = r.varint();
  for (std::uint64_t i = 0; i < unigram_count; ++i) {
    const auto token = static_cast<TokenId>(r.varint());
    unigrams[token] = r.varint();
  }
  std::map<std::pair<TokenId, TokenId>, std::uint64_t> bigrams;
  const std::uint64_t bigram_count = r.varint();
  for (std::uint64_t i = 0; i < bigram_count; ++i) {
    const auto a = static_cast<TokenId>(r.varint());
    const auto b = static_cast<TokenId>(r.varint());
    bigrams[{a, b}] = r.varint();
  }
  r.expect_eof();
  return ReferenceScorer(std::move(bigrams), std::move(unigrams), std::move(vocab), lambda_copy,
                         add_k);
}

ScorerInput make_scorer_input(const std::string& left, const std::string& mention,
                              const std::string& right) {
  std::string context;
  if (!left.empty()) context += left + " ";
  context += "[START] " + mention + " [END]";
  if (!right.empty()) context += " " + right;
  return ScorerInput{tokenize(context), tokenize(mention)};
}

}  // namespace mel
