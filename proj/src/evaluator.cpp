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

#include "mel/evaluator.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mel {

void EvalAccumulator::add(const MentionInstance& inst, const EntityId& prediction) {
  if (!inst.gold) throw MissingGold();
  auto& [correct, total] = counts_[inst.lang];
  ++total;
  if (*inst.gold == prediction) ++correct;
}

void EvalAccumulator::merge(const EvalAccumulator& other) {
  for (const auto& [lang, counts] : other.counts_) {
    auto& slot = counts_[lang];
    slot.first += counts.first;
    slot.second += counts.second;
  }
}

EvalReport EvalAccumulator::finish() const {
  EvalReport report;
  std::uint64_t correct_sum = 0;
  std::uint64_t total_sum = 0;
  double accuracy_sum = 0.0;
  for (const auto& [lang, counts] : counts_) {
    LanguageStats stats;
    stats.correct = counts.first;
    stats.total = counts.second;
    stats.accuracy =
        counts.second == 0 ? 0.0 : static_cast<double>(counts.first) / counts.second;
    correct_sum += stats.correct;
    total_sum += stats.total;
    accuracy_sum += stats.accuracy;
    report.per_language.emplace(lang, stats);
  }
  report.micro_avg = total_sum == 0 ? 0.0 : static_cast<double>(correct_sum) / total_sum;
  report.macro_avg =
      report.per_language.empty() ? 0.0 : accuracy_sum / report.per_language.size();
  return report;
}

EvalReport accuracy(const std::vector<Prediction>& predictions) {
  EvalAccumulator acc;
  for (const auto& [inst, predicted] : predictions) acc.add(inst, predicted);
  return acc.finish();
}

BucketSpec::BucketSpec(std::vector<std::uint64_t> edge_list) : edges(std::move(edge_list)) {
  if (edges.empty() || edges.front() != 0) {
    throw std::invalid_argument("bucket edges must start at 0");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] <= edges[i - 1]) {
      throw std::invalid_argument("bucket edges must be strictly ascending");
    }
  }
}

std::size_t BucketSpec::bucket_of(std::uint64_t value) const {
  const auto it = std::upper_bound(edges.begin(), edges.end(), value);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

std::string BucketSpec::label(std::size_t bucket) const {
  if (bucket + 1 < edges.size()) {
    return "[" + std::to_string(edges[bucket]) + ", " + std::to_string(edges[bucket + 1]) + ")";
  }
  return "[" + std::to_string(edges[bucket]) + ", +)";
}

BucketSpec BucketSpec::entity_frequency() { return BucketSpec({0, 1, 10, 100, 1000, 10000}); }

BucketSpec BucketSpec::mention_frequency() {
  return BucketSpec({0, 1, 10, 100, 1000, 10000, 100000, 1000000});
}

BucketSpec BucketSpec::candidate_count() { return BucketSpec({0, 1, 10, 100, 1000, 10000}); }

std::vector<BucketRow> bucket_report(const std::vector<Prediction>& predictions,
                                     const BucketKeyFn& key, const BucketSpec& spec) {
  std::vector<BucketRow> rows(spec.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].label = spec.label(i);
  for (const auto& [inst, predicted] : predictions) {
    if (!inst.gold) throw MissingGold();
    BucketRow& row = rows[spec.bucket_of(key(inst))];
    ++row.support;
    if (*inst.gold == predicted) ++row.correct;
  }
  for (BucketRow& row : rows) {
    row.accuracy = row.support == 0 ? 0.0 : static_cast<double>(row.correct) / row.support;
  }
  return rows;
}

BucketKeyFn entity_frequency_key(const KnowledgeBase& kb) {
  return [&kb](const MentionInstance& inst) -> std::uint64_t {
    if (!inst.gold) throw MissingGold();
    return kb.total_mentions(*inst.gold);
  };
}

BucketKeyFn mention_frequency_key(const AliasTable& table) {
  return [&table](const MentionInstance& inst) { return table.mention_count(inst.mention); };
}

BucketKeyFn candidate_count_key(const AliasTable& table) {
  return [&table](const MentionInstance& inst) {
    return static_cast<std::uint64_t>(table.candidates(inst.mention).size());
  };
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::json langs = nlohmann::json::object();
  for (const auto& [lang, stats] : report.per_language) {
    langs[lang.value()] = {
        {"correct", stats.correct}, {"total", stats.total}, {"accuracy", stats.accuracy}};
  }
  const nlohmann::json out = {{"per_language", langs},
                              {"micro_avg", report.micro_avg},
                              {"macro_avg", report.macro_avg}};
  return out.dump();
}

std::string report_to_table(const EvalReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(10) << "lang" << std::right << std::setw(10) << "correct"
      << std::setw(10) << "total" << std::setw(12) << "accuracy" << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& [lang, stats] : report.per_language) {
    out << std::left << std::setw(10) << lang.value() << std::right << std::setw(10)
        << stats.correct << std::setw(10) << stats.total << std::setw(12) << stats.accuracy
        << '\n';
  }
  out << std::left << std::setw(10) << "micro" << std::right << std::setw(32) << report.micro_avg
      << '\n';
  out << std::left << std::setw(10) << "macro" << std::right << std::setw(32) << report.macro_avg
      << '\n';
  return out.str();
}

std::string buckets_to_json(const std::string& key_name, const std::vector<BucketRow>& rows) {
  nlohmann::json buckets = nlohmann::json::array();
  for (const BucketRow& row : rows) {
    buckets.push_back({{"bin", row.label},
                       {"support", row.support},
                       {"correct", row.correct},
                       {"accuracy", row.accuracy}});
  }
  const nlohmann::json out = {{"key", key_name}, {"buckets", buckets}};
  return out.dump();
}

std::string buckets_to_table(const std::string& key_name, const std::vector<BucketRow>& rows) {
  std::ostringstream out;
  out << "breakdown by " << key_name << '\n';
  out << std::left << std::setw(18) << "bin" << std::right << std::setw(10) << "support"
      << std::setw(10) << "correct" << std::setw(12) << "accuracy" << '\n';
  out << std::fixed << std::setprecision(4);
  for (const BucketRow& row : rows) {
    out << std::left << std::setw(18) << row.label << std::right << std::setw(10) << row.support
        << std::setw(10) << row.correct << std::setw(12) << row.accuracy << '\n';
  }
  return out.str();
}

}  // namespace mel
