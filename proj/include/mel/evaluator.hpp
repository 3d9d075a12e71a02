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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mel/alias_table.hpp"
#include "mel/corpus.hpp"
#include "mel/errors.hpp"
#include "mel/kb_store.hpp"
#include "mel/types.hpp"

namespace mel {

struct LanguageStats {
  std::uint64_t correct = 0;
  std::uint64_t total = 0;
  double accuracy = 0.0;
};

struct EvalReport {
  std::map<LanguageCode, LanguageStats> per_language;
  double micro_avg = 0.0;  // instance-weighted
  double macro_avg = 0.0;  // unweighted mean over languages
};

using Prediction = std::pair<MentionInstance, EntityId>;

// Streaming accumulator; partial shards can be merged before finishing.
class EvalAccumulator {
 public:
  void add(const MentionInstance& inst, const EntityId& prediction);
  void merge(const EvalAccumulator& other);
  EvalReport finish() const;

 private:
  std::map<LanguageCode, std::pair<std::uint64_t, std::uint64_t>> counts_;  // correct, total
};

// Exact-match accuracy per language plus micro/macro aggregates. Every
// instance must carry a gold entity.
EvalReport accuracy(const std::vector<Prediction>& predictions);

// Half-open frequency bins [e0,e1), [e1,e2), ..., last bin open-ended.
// Edges must be strictly ascending and start at 0.
struct BucketSpec {
  std::vector<std::uint64_t> edges;

  explicit BucketSpec(std::vector<std::uint64_t> edge_list);

  std::size_t bucket_of(std::uint64_t value) const;
  std::string label(std::size_t bucket) const;
  std::size_t size() const { return edges.size(); }

  // Entity-frequency and candidate-count breakdowns share these bins.
  static BucketSpec entity_frequency();  // 0,1,10,100,1k,10k
  static BucketSpec mention_frequency(); // extends to 1M
  static BucketSpec candidate_count();
};

struct BucketRow {
  std::string label;
  std::uint64_t support = 0;
  std::uint64_t correct = 0;
  double accuracy = 0.0;
};

using BucketKeyFn = std::function<std::uint64_t(const MentionInstance&)>;

// Assigns every instance to its bucket by key value and reports per-bucket
// support and accuracy. Buckets partition the instances.
std::vector<BucketRow> bucket_report(const std::vector<Prediction>& predictions,
                                     const BucketKeyFn& key, const BucketSpec& spec);

// Bucket keys: training frequency of the gold entity, training frequency of
// the mention string, and retrieved-candidate count.
BucketKeyFn entity_frequency_key(const KnowledgeBase& kb);
BucketKeyFn mention_frequency_key(const AliasTable& table);
BucketKeyFn candidate_count_key(const AliasTable& table);

// Rendering: machine-readable JSON and an aligned-column text table.
std::string report_to_json(const EvalReport& report);
std::string report_to_table(const EvalReport& report);
std::string buckets_to_json(const std::string& key_name, const std::vector<BucketRow>& rows);
std::string buckets_to_table(const std::string& key_name, const std::vector<BucketRow>& rows);

}  // namespace mel
