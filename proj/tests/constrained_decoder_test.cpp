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

#include <cmath>
#include <random>

#include "doctest.h"
#include "mel/identifier_codec.hpp"

using namespace mel;

namespace {

const EntityId kQ1("Q1");
const LanguageCode kEn("en");

Trie make_trie(const std::vector<std::string>& names) {
  Trie::Builder builder;
  for (const std::string& name : names) builder.insert(tokenize(name), kQ1, kEn, false);
  return std::move(builder).build();
}

ScorerInput input_for(const std::string& mention) {
  return make_scorer_input("", mention, "");
}

std::string text_of(const ScoredHypothesis& hyp) { return detokenize(hyp.hypothesis.tokens); }

}  // namespace

TEST_CASE("uniform scorer ties break lexicographically") {
  const Trie trie = make_trie({"AB", "AC"});
  const ReferenceScorer scorer({}, {}, {tokenize("A")[0], tokenize("B")[0], tokenize("C")[0],
                                        kEosToken},
                               0.0, 1.0);
  const auto results = beam_search(scorer, trie, input_for("AB"), BeamConfig{2, 1.0, 32});
  REQUIRE(results.size() == 2);
  CHECK(text_of(results[0]) == "AB");
  CHECK(text_of(results[1]) == "AC");
  const double expected = 3.0 * std::log(1.0 / 4.0);  // vocab {A,B,C,EOS}
  CHECK(results[0].hypothesis.logprob == doctest::Approx(expected).epsilon(1e-12));
  CHECK(results[0].hypothesis.logprob == results[1].hypothesis.logprob);
  CHECK(results[0].ranked_score == results[1].ranked_score);
  CHECK(results[0].hypothesis.finished);
}

TEST_CASE("one-step dominance with a trained bigram") {
  const Trie trie = make_trie({"AB", "AC"});
  // p(B|A) > p(C|A): two AB targets, one AC.
  const auto pairs = std::vector<std::pair<ScorerInput, TokenSequence>>{
      {input_for("x"), tokenize("AB")},
      {input_for("x"), tokenize("AB")},
      {input_for("x"), tokenize("AC")}};
  const ReferenceScorer scorer = train_reference(pairs, 0.0, 1.0);
  const auto results = beam_search(scorer, trie, input_for("x"), BeamConfig{1, 1.0, 32});
  REQUIRE(results.size() == 1);
  CHECK(text_of(results[0]) == "AB");
}

TEST_CASE("single-identifier trie returns exactly that identifier") {
  const Trie trie = make_trie({"solo"});
  const auto pairs = std::vector<std::pair<ScorerInput, TokenSequence>>{
      {input_for("solo"), tokenize("solo")}};
  const ReferenceScorer scorer = train_reference(pairs, 0.5, 1.0);
  const auto results = beam_search(scorer, trie, input_for("solo"), BeamConfig{});
  REQUIRE(results.size() == 1);
  CHECK(text_of(results[0]) == "solo");
  CHECK(results[0].hypothesis.finished);
}

TEST_CASE("beam search refuses an empty trie") {
  const Trie trie = make_trie({});
  const ReferenceScorer scorer({}, {}, {tokenize("A")[0], kEosToken}, 0.0, 1.0);
  CHECK_THROWS_AS(beam_search(scorer, trie, input_for("A"), BeamConfig{}), EmptyTrie);
}

TEST_CASE("finished hypotheses are always complete identifiers (property)") {
  std::mt19937 rng(5);
  const std::string alphabet = "abcd";
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> names;
    const int count = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < count; ++i) {
      std::string name;
      const int len = 1 + static_cast<int>(rng() % 6);
      for (int k = 0; k < len; ++k) name.push_back(alphabet[rng() % alphabet.size()]);
      names.push_back(name);
    }
    const Trie trie = make_trie(names);

    std::vector<std::pair<ScorerInput, TokenSequence>> pairs;
    for (const std::string& name : names) pairs.emplace_back(input_for(name), tokenize(name));
    const ReferenceScorer scorer =
        train_reference(pairs, (rng() % 100) / 100.0, 0.5 + (rng() % 4) / 2.0);

    const BeamConfig cfg{1 + static_cast<int>(rng() % 5), (rng() % 3) / 2.0,
                         4 + static_cast<int>(rng() % 12)};
    const auto results = beam_search(scorer, trie, input_for(names[0]), cfg);
    for (const auto& hyp : results) {
      CHECK(hyp.hypothesis.finished);
      CHECK(trie.is_identifier(hyp.hypothesis.tokens));
      CHECK(hyp.hypothesis.logprob <= 0.0);
    }
  }
}

TEST_CASE("beam search matches the exhaustive oracle when the beam covers everything") {
  std::mt19937 rng(13);
  const std::string alphabet = "abcde";
  for (int trial = 0; trial < 50; ++trial) {
    std::set<std::string> name_set;
    const int count = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < count; ++i) {
      std::string name;
      const int len = 1 + static_cast<int>(rng() % 7);
      for (int k = 0; k < len; ++k) name.push_back(alphabet[rng() % alphabet.size()]);
      name_set.insert(name);
    }
    const std::vector<std::string> names(name_set.begin(), name_set.end());
    const Trie trie = make_trie(names);

    std::vector<std::pair<ScorerInput, TokenSequence>> pairs;
    for (const std::string& name : names) pairs.emplace_back(input_for(name), tokenize(name));
    const ReferenceScorer scorer =
        train_reference(pairs, (rng() % 100) / 100.0, 0.5 + (rng() % 4) / 2.0);
    const ScorerInput input = input_for(names[rng() % names.size()]);

    const double length_penalty = (rng() % 5) / 2.0;
    const BeamConfig cfg{static_cast<int>(names.size()), length_penalty, 32};
    const auto beam = beam_search(scorer, trie, input, cfg);

    std::vector<TokenSequence> identifiers;
    for (const std::string& name : names) identifiers.push_back(tokenize(name));
    const auto oracle = exhaustive_rank(scorer, identifiers, input, length_penalty);

    REQUIRE(beam.size() == oracle.size());
    for (std::size_t i = 0; i < beam.size(); ++i) {
      CHECK(beam[i].hypothesis.tokens == oracle[i].first);
      CHECK(beam[i].hypothesis.logprob == doctest::Approx(oracle[i].second).epsilon(1e-12));
    }
  }
}

TEST_CASE("widening the beam never hurts the returned frontier") {
  std::mt19937 rng(37);
  const std::string alphabet = "abc";
  for (int trial = 0; trial < 30; ++trial) {
    std::set<std::string> name_set;
    for (int i = 0; i < 12; ++i) {
      std::string name;
      const int len = 1 + static_cast<int>(rng() % 5);
      for (int k = 0; k < len; ++k) name.push_back(alphabet[rng() % alphabet.size()]);
      name_set.insert(name);
    }
    const std::vector<std::string> names(name_set.begin(), name_set.end());
    const Trie trie = make_trie(names);
    std::vector<std::pair<ScorerInput, TokenSequence>> pairs;
    for (const std::string& name : names) pairs.emplace_back(input_for(name), tokenize(name));
    const ReferenceScorer scorer = train_reference(pairs, 0.4, 1.0);
    const ScorerInput input = input_for(names[0]);

    const int k = 1 + static_cast<int>(rng() % 4);
    const auto narrow = beam_search(scorer, trie, input, BeamConfig{k, 1.0, 32});
    const auto wide = beam_search(scorer, trie, input, BeamConfig{k + 3, 1.0, 32});
    REQUIRE(wide.size() >= narrow.size());
    for (std::size_t i = 0; i < narrow.size(); ++i) {
      CHECK(wide[i].ranked_score >= narrow[i].ranked_score - 1e-15);
    }
  }
}

TEST_CASE("length penalty zero ranks by raw logprob") {
  const Trie trie = make_trie({"ab", "xyzw"});
  const auto pairs = std::vector<std::pair<ScorerInput, TokenSequence>>{
      {input_for("ab"), tokenize("ab")}, {input_for("xyzw"), tokenize("xyzw")}};
  const ReferenceScorer scorer = train_reference(pairs, 0.0, 1.0);
  const auto results = beam_search(scorer, trie, input_for("ab"), BeamConfig{4, 0.0, 32});
  for (const auto& hyp : results) {
    CHECK(hyp.ranked_score == hyp.hypothesis.logprob);
  }
}

TEST_CASE("hypotheses that cannot finish within max_steps are dropped") {
  const Trie trie = make_trie({"abcdef", "ab"});
  const auto pairs = std::vector<std::pair<ScorerInput, TokenSequence>>{
      {input_for("abcdef"), tokenize("abcdef")}, {input_for("ab"), tokenize("ab")}};
  const ReferenceScorer scorer = train_reference(pairs, 0.0, 1.0);
  // "abcdef" needs 7 steps (6 tokens + EOS); cap at 3 leaves only "ab".
  const auto results = beam_search(scorer, trie, input_for("ab"), BeamConfig{4, 1.0, 3});
  REQUIRE(results.size() == 1);
  CHECK(text_of(results[0]) == "ab");
}

TEST_CASE("exhaustive_rank edge cases") {
  const ReferenceScorer scorer({}, {}, {tokenize("a")[0], kEosToken}, 0.0, 1.0);
  CHECK(exhaustive_rank(scorer, {}, input_for("a")).empty());

  const std::vector<TokenSequence> two{tokenize("a"), tokenize("aa")};
  CHECK_THROWS_AS(exhaustive_rank(scorer, two, input_for("a"), 1.0, 1), TooManyIdentifiers);

  // equal scores sort lexicographically
  const ReferenceScorer uniform({}, {}, {tokenize("a")[0], tokenize("b")[0], kEosToken}, 0.0,
                                1.0);
  const auto ranked = exhaustive_rank(uniform, {tokenize("b"), tokenize("a")}, input_for("a"));
  REQUIRE(ranked.size() == 2);
  CHECK(detokenize(ranked[0].first) == "a");
  CHECK(detokenize(ranked[1].first) == "b");
}
