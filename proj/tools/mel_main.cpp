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

// mel: build artifacts, train the reference scorer, link mentions, evaluate.
// Data flows through files; logs go to standard error.

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "mel/alias_table.hpp"
#include "mel/binary_io.hpp"
#include "mel/constrained_decoder.hpp"
#include "mel/corpus.hpp"
#include "mel/entity_ranker.hpp"
#include "mel/errors.hpp"
#include "mel/evaluator.hpp"
#include "mel/identifier_codec.hpp"
#include "mel/kb_store.hpp"
#include "mel/prefix_trie.hpp"
#include "mel/scorer.hpp"
#include "mel/unicode.hpp"

namespace {

constexpr std::string_view kPairsTag = "MELPR001";

std::ifstream open_input(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw mel::Error("cannot open input file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw mel::Error("cannot open output file: " + path);
  return out;
}

mel::RenderMode parse_mode(const std::string& mode) {
  const auto parsed = mel::render_mode_from_string(mode);
  if (!parsed) {
    throw mel::Error("unknown mode '" + mode + "' (expected name-first, lang-first, canonical)");
  }
  return *parsed;
}

void write_pairs(std::ostream& out,
                 const std::vector<std::pair<mel::ScorerInput, mel::TokenSequence>>& pairs) {
  mel::BinaryWriter w(out);
  w.tag(kPairsTag);
  w.varint(pairs.size());
  const auto write_tokens = [&w](const mel::TokenSequence& tokens) {
    w.varint(tokens.size());
    for (mel::TokenId t : tokens) w.varint(t);
  };
  for (const auto& [input, target] : pairs) {
    write_tokens(input.context_tokens);
    write_tokens(input.mention_tokens);
    write_tokens(target);
  }
}

std::vector<std::pair<mel::ScorerInput, mel::TokenSequence>> read_pairs(std::istream& in) {
  mel::BinaryReader r(in, "pairs");
  r.expect_tag(kPairsTag);
  const std::uint64_t count = r.varint();
  const auto read_tokens = [&r] {
    mel::TokenSequence tokens;
    const std::uint64_t len = r.varint();
    tokens.reserve(len);
    for (std::uint64_t i = 0; i < len; ++i) tokens.push_back(static_cast<mel::TokenId>(r.varint()));
    return tokens;
  };
  std::vector<std::pair<mel::ScorerInput, mel::TokenSequence>> pairs;
  pairs.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    mel::ScorerInput input;
    input.context_tokens = read_tokens();
    input.mention_tokens = read_tokens();
    pairs.emplace_back(std::move(input), read_tokens());
  }
  r.expect_eof();
  return pairs;
}

std::vector<std::pair<std::string, mel::EntityId>> read_label_tsv(std::istream& in) {
  std::vector<std::pair<std::string, mel::EntityId>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      throw mel::MalformedLine(line_no, "expected 'label<TAB>entity-id'");
    }
    out.emplace_back(mel::nfc(line.substr(0, tab)), mel::EntityId(line.substr(tab + 1)));
  }
  return out;
}

int cmd_build_kb(const std::string& in_path, const std::string& filter_path,
                 const std::string& out_path) {
  auto in = open_input(in_path);
  std::vector<mel::EntityRecord> records = mel::read_kb_jsonl(in);
  std::set<mel::EntityId> excluded;
  if (!filter_path.empty()) {
    auto filter_in = open_input(filter_path);
    excluded = mel::read_filter_list(filter_in);
  }
  const mel::KnowledgeBase kb = mel::KnowledgeBase::ingest(std::move(records), excluded);
  auto out = open_output(out_path, true);
  kb.save(out);
  std::cerr << "build-kb: " << kb.entities().size() << " entities -> " << out_path << "\n";
  return 0;
}

int cmd_build_trie(const std::string& kb_path, const std::string& mode_name, bool redirects,
                   const std::string& out_path) {
  const mel::RenderMode mode = parse_mode(mode_name);
  if (mode == mel::RenderMode::kCanonical && redirects) {
    throw mel::Error("--redirects does not apply to canonical mode (one name per entity)");
  }
  auto kb_in = open_input(kb_path, true);
  const mel::KnowledgeBase kb = mel::KnowledgeBase::load(kb_in);
  const mel::Trie trie = mel::build_kb_trie(kb, mode, redirects);
  auto out = open_output(out_path, true);
  trie.serialize(out);
  std::cerr << "build-trie: " << trie.name_count() << " identifiers, " << trie.node_count()
            << " nodes -> " << out_path << "\n";
  return 0;
}

int cmd_build_alias(const std::string& mentions_path, const std::string& kb_path,
                    const std::string& labels_path, const std::string& out_path) {
  auto kb_in = open_input(kb_path, true);
  const mel::KnowledgeBase kb = mel::KnowledgeBase::load(kb_in);
  auto mentions_in = open_input(mentions_path);
  const auto mentions = mel::read_training_mentions(mentions_in);
  std::vector<std::pair<std::string, mel::EntityId>> labels;
  if (!labels_path.empty()) {
    auto labels_in = open_input(labels_path);
    labels = read_label_tsv(labels_in);
  }
  const mel::AliasTable table = mel::AliasTable::build(mentions, kb, labels);
  auto out = open_output(out_path);
  table.save_jsonl(out);
  std::cerr << "build-alias: " << table.size() << " mention strings -> " << out_path << "\n";
  return 0;
}

int cmd_align(const std::string& links_path, const std::string& kb_path,
              const std::string& redirects_path, const std::string& out_path) {
  auto kb_in = open_input(kb_path, true);
  const mel::KnowledgeBase kb = mel::KnowledgeBase::load(kb_in);
  auto links_in = open_input(links_path);
  const auto links = mel::load_hyperlinks(links_in);
  mel::RedirectMap redirects;
  if (!redirects_path.empty()) {
    auto redirects_in = open_input(redirects_path);
    redirects = mel::load_redirects(redirects_in);
  }
  const auto [instances, stats] = mel::align_hyperlinks(links, kb, redirects);
  auto out = open_output(out_path);
  for (const mel::MentionInstance& inst : instances) {
    out << inst.lang.value() << '\t' << inst.left << '\t' << inst.mention << '\t' << inst.right
        << '\t' << (inst.gold ? inst.gold->value() : "") << '\n';
  }
  const nlohmann::json report = {{"direct", stats.direct},
                                 {"via_redirect", stats.via_redirect},
                                 {"via_search", stats.via_search},
                                 {"dropped_ambiguous", stats.dropped_ambiguous},
                                 {"dropped_unresolved", stats.dropped_unresolved}};
  std::cerr << "align: " << report.dump() << "\n";
  return 0;
}

int cmd_make_pairs(const std::string& mentions_path, const std::string& kb_path,
                   const std::string& mode_name, std::uint64_t seed, int max_input,
                   const std::string& out_path) {
  const mel::RenderMode mode = parse_mode(mode_name);
  auto kb_in = open_input(kb_path, true);
  const mel::KnowledgeBase kb = mel::KnowledgeBase::load(kb_in);
  auto mentions_in = open_input(mentions_path);
  const auto instances = mel::load_mentions(mentions_in);
  const auto pairs = mel::training_pairs(instances, kb, mode, seed, max_input);
  auto out = open_output(out_path, true);
  write_pairs(out, pairs);
  std::cerr << "make-pairs: " << pairs.size() << " pairs -> " << out_path << "\n";
  return 0;
}

int cmd_train_scorer(const std::string& pairs_path, double lambda_copy, double add_k,
                     const std::string& out_path) {
  auto in = open_input(pairs_path, true);
  const auto pairs = read_pairs(in);
  const mel::ReferenceScorer scorer = mel::train_reference(pairs, lambda_copy, add_k);
  auto out = open_output(out_path, true);
  scorer.save(out);
  std::cerr << "train-scorer: vocab " << scorer.vocab().size() << ", " << pairs.size()
            << " pairs -> " << out_path << "\n";
  return 0;
}

struct LinkOptions {
  std::string kb_path;
  std::string trie_path;
  std::string scorer_path;
  std::string alias_path;
  std::string in_path;
  std::string out_path;
  std::optional<std::size_t> top_k;
  bool marginalize = false;
  double alpha = 0.5;
  mel::BeamConfig beam;
  int max_input = mel::kDefaultMaxInputTokens;
  int threads = 1;
};

int cmd_link(const LinkOptions& opt) {
  auto kb_in = open_input(opt.kb_path, true);
  const mel::KnowledgeBase kb = mel::KnowledgeBase::load(kb_in);
  auto trie_in = open_input(opt.trie_path, true);
  const mel::Trie trie = mel::Trie::deserialize(trie_in);
  auto scorer_in = open_input(opt.scorer_path, true);
  const mel::ReferenceScorer scorer = mel::ReferenceScorer::load(scorer_in);

  std::unique_ptr<mel::AliasTable> alias;
  if (!opt.alias_path.empty()) {
    auto alias_in = open_input(opt.alias_path);
    alias = std::make_unique<mel::AliasTable>(mel::AliasTable::load_jsonl(alias_in));
  }

  mel::LinkConfig cfg;
  cfg.mode = trie.mode();
  cfg.include_redirects = trie.redirects_included();
  cfg.use_candidates = alias != nullptr;
  cfg.use_marginalization = opt.marginalize;
  cfg.alpha = opt.alpha;
  cfg.beam = opt.beam;
  cfg.max_input_tokens = opt.max_input;
  cfg.candidate_top_k = opt.top_k;

  auto mentions_in = open_input(opt.in_path);
  const auto instances = mel::load_mentions(mentions_in);

  // Mentions are independent; workers share the immutable KB, trie, and
  // scorer. Results are written in input order whatever the thread count.
  std::vector<std::string> outputs(instances.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= instances.size()) return;
      try {
        const mel::LinkResult result = mel::link(instances[i], kb, trie, alias.get(), scorer, cfg);
        const mel::EntityScore& top = result.ranking.front();
        nlohmann::json supporting = nlohmann::json::array();
        for (const mel::SupportingIdentifier& s : top.supporting) {
          supporting.push_back(
              {{"identifier", s.identifier}, {"logprob", s.logprob}, {"length", s.length}});
        }
        const nlohmann::json record = {{"qid", result.prediction.value()},
                                       {"score", top.score},
                                       {"lang", instances[i].lang.value()},
                                       {"mention", instances[i].mention},
                                       {"mode", mel::to_string(cfg.mode)},
                                       {"candidates", cfg.use_candidates},
                                       {"used_candidates", result.used_candidates},
                                       {"marginalize", cfg.use_marginalization},
                                       {"supporting", supporting}};
        outputs[i] = record.dump();
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) {
          try {
            std::throw_with_nested(mel::Error("link failed on input line " + std::to_string(i + 1)));
          } catch (...) {
            first_error = std::current_exception();
          }
        }
        next.store(instances.size());
        return;
      }
    }
  };

  const int thread_count = std::max(1, opt.threads);
  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  auto out = open_output(opt.out_path);
  for (const std::string& line : outputs) out << line << '\n';
  std::cerr << "link: " << instances.size() << " mentions -> " << opt.out_path << "\n";
  return 0;
}

int cmd_eval(const std::string& preds_path, const std::string& gold_path,
             const std::vector<std::string>& buckets, const std::string& kb_path,
             const std::string& alias_path, const std::string& out_path) {
  auto gold_in = open_input(gold_path);
  const auto instances = mel::load_mentions(gold_in);

  std::vector<mel::EntityId> predictions;
  {
    auto preds_in = open_input(preds_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(preds_in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw mel::MalformedLine(line_no, e.what());
      }
      if (!obj.is_object() || !obj.contains("qid") || !obj["qid"].is_string()) {
        throw mel::MalformedLine(line_no, "prediction record needs a 'qid' string");
      }
      predictions.emplace_back(obj["qid"].get<std::string>());
    }
  }
  if (predictions.size() != instances.size()) {
    throw mel::Error("prediction/gold size mismatch: " + std::to_string(predictions.size()) +
                     " vs " + std::to_string(instances.size()));
  }

  std::vector<mel::Prediction> joined;
  joined.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    joined.emplace_back(instances[i], predictions[i]);
  }

  const mel::EvalReport report = mel::accuracy(joined);
  std::vector<std::pair<std::string, std::vector<mel::BucketRow>>> bucket_outputs;
  for (const std::string& bucket : buckets) {
    if (bucket == "entity") {
      if (kb_path.empty()) throw mel::Error("--buckets entity requires --kb");
      auto kb_in = open_input(kb_path, true);
      const mel::KnowledgeBase kb = mel::KnowledgeBase::load(kb_in);
      bucket_outputs.emplace_back(
          "entity_frequency", mel::bucket_report(joined, mel::entity_frequency_key(kb),
                                                 mel::BucketSpec::entity_frequency()));
    } else if (bucket == "mention" || bucket == "candidates") {
      if (alias_path.empty()) throw mel::Error("--buckets " + bucket + " requires --alias");
      auto alias_in = open_input(alias_path);
      const mel::AliasTable table = mel::AliasTable::load_jsonl(alias_in);
      if (bucket == "mention") {
        bucket_outputs.emplace_back(
            "mention_frequency", mel::bucket_report(joined, mel::mention_frequency_key(table),
                                                    mel::BucketSpec::mention_frequency()));
      } else {
        bucket_outputs.emplace_back(
            "candidate_count", mel::bucket_report(joined, mel::candidate_count_key(table),
                                                  mel::BucketSpec::candidate_count()));
      }
    } else {
      throw mel::Error("unknown bucket key '" + bucket +
                       "' (expected entity, mention, or candidates)");
    }
  }

  // JSON goes to --out (or stdout); the human-readable table goes to the
  // other stream so pipelines can consume the JSON directly.
  std::ostringstream json_out;
  json_out << mel::report_to_json(report) << '\n';
  for (const auto& [name, rows] : bucket_outputs) {
    json_out << mel::buckets_to_json(name, rows) << '\n';
  }
  std::ostringstream table_out;
  table_out << mel::report_to_table(report);
  for (const auto& [name, rows] : bucket_outputs) {
    table_out << mel::buckets_to_table(name, rows);
  }

  if (!out_path.empty()) {
    auto out = open_output(out_path);
    out << json_out.str();
    std::cout << table_out.str();
  } else {
    std::cout << json_out.str();
    std::cerr << table_out.str();
  }
  return 0;
}

int cmd_stats(const std::string& trie_path) {
  auto in = open_input(trie_path, true);
  const mel::Trie trie = mel::Trie::deserialize(in);
  const auto byte_size = std::filesystem::file_size(trie_path);
  const nlohmann::json stats = {{"node_count", trie.node_count()},
                                {"name_count", trie.name_count()},
                                {"byte_size", byte_size},
                                {"mode", mel::to_string(trie.mode())},
                                {"redirects_included", trie.redirects_included()}};
  std::cout << stats.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multilingual entity linking via trie-constrained generation"};
  app.require_subcommand(1);

  // build-kb
  std::string in_path, out_path, filter_path;
  auto* build_kb = app.add_subcommand("build-kb", "ingest a JSONL entity dump");
  build_kb->add_option("--in", in_path, "entity JSONL file")->required();
  build_kb->add_option("--filter", filter_path, "excluded class list (one id per line)");
  build_kb->add_option("--out", out_path, "output KB file")->required();

  // build-trie
  std::string trie_kb_path, trie_mode = "name-first", trie_out;
  bool trie_redirects = false;
  auto* build_trie = app.add_subcommand("build-trie", "build the identifier trie");
  build_trie->add_option("--kb", trie_kb_path, "KB file")->required();
  build_trie->add_option("--mode", trie_mode, "name-first|lang-first|canonical");
  build_trie->add_flag("--redirects", trie_redirects, "include redirect names");
  build_trie->add_option("--out", trie_out, "output trie file")->required();

  // build-alias
  std::string alias_mentions, alias_kb, alias_labels, alias_out;
  auto* build_alias = app.add_subcommand("build-alias", "build the mention alias table");
  build_alias->add_option("--mentions", alias_mentions, "training mentions TSV")->required();
  build_alias->add_option("--kb", alias_kb, "KB file")->required();
  build_alias->add_option("--labels", alias_labels, "extra label TSV (label, entity)");
  build_alias->add_option("--out", alias_out, "output alias JSONL")->required();

  // align
  std::string align_links, align_kb, align_redirects, align_out;
  auto* align = app.add_subcommand("align", "resolve hyperlink targets to entities");
  align->add_option("--links", align_links, "hyperlinks TSV")->required();
  align->add_option("--kb", align_kb, "KB file")->required();
  align->add_option("--redirects", align_redirects, "redirect TSV");
  align->add_option("--out", align_out, "output mentions TSV")->required();

  // make-pairs
  std::string pairs_mentions, pairs_kb, pairs_mode = "name-first", pairs_out;
  std::uint64_t pairs_seed = 17;
  int pairs_max_input = mel::kDefaultMaxInputTokens;
  auto* make_pairs = app.add_subcommand("make-pairs", "build scorer training pairs");
  make_pairs->add_option("--mentions", pairs_mentions, "training mentions TSV")->required();
  make_pairs->add_option("--kb", pairs_kb, "KB file")->required();
  make_pairs->add_option("--mode", pairs_mode, "name-first|lang-first|canonical");
  make_pairs->add_option("--seed", pairs_seed, "sampling seed");
  make_pairs->add_option("--max-input", pairs_max_input, "input token budget");
  make_pairs->add_option("--out", pairs_out, "output pairs file")->required();

  // train-scorer
  std::string scorer_pairs, scorer_out;
  double lambda_copy = 0.5, add_k = 1.0;
  auto* train_scorer = app.add_subcommand("train-scorer", "train the reference scorer");
  train_scorer->add_option("--pairs", scorer_pairs, "pairs file")->required();
  train_scorer->add_option("--lambda-copy", lambda_copy, "copy mixture weight");
  train_scorer->add_option("--add-k", add_k, "additive smoothing constant");
  train_scorer->add_option("--out", scorer_out, "output scorer file")->required();

  // link
  LinkOptions link_opt;
  long long link_top_k = -1;
  auto* link_cmd = app.add_subcommand("link", "link mentions to entities");
  link_cmd->add_option("--kb", link_opt.kb_path, "KB file")->required();
  link_cmd->add_option("--trie", link_opt.trie_path, "trie file")->required();
  link_cmd->add_option("--scorer", link_opt.scorer_path, "scorer file")->required();
  link_cmd->add_option("--alias", link_opt.alias_path,
                       "alias table JSONL (enables candidate restriction)");
  link_cmd->add_option("--top-k", link_top_k, "candidate list truncation (default: full list)");
  link_cmd->add_flag("--marginalize", link_opt.marginalize, "marginalize over languages");
  link_cmd->add_option("--alpha", link_opt.alpha, "length-normalization exponent");
  link_cmd->add_option("--beams", link_opt.beam.beams, "beam count");
  link_cmd->add_option("--lenpen", link_opt.beam.length_penalty, "length penalty");
  link_cmd->add_option("--max-steps", link_opt.beam.max_steps, "maximum decoding steps");
  link_cmd->add_option("--max-input", link_opt.max_input, "input token budget");
  link_cmd->add_option("--threads", link_opt.threads, "worker threads");
  link_cmd->add_option("--in", link_opt.in_path, "mentions TSV")->required();
  link_cmd->add_option("--out", link_opt.out_path, "output predictions JSONL")->required();

  // eval
  std::string eval_preds, eval_gold, eval_kb, eval_alias, eval_out;
  std::vector<std::string> eval_buckets;
  auto* eval = app.add_subcommand("eval", "score predictions against gold");
  eval->add_option("--preds", eval_preds, "predictions JSONL")->required();
  eval->add_option("--gold", eval_gold, "gold mentions TSV")->required();
  eval->add_option("--buckets", eval_buckets, "entity|mention|candidates (repeatable)");
  eval->add_option("--kb", eval_kb, "KB file (for entity buckets)");
  eval->add_option("--alias", eval_alias, "alias JSONL (for mention/candidate buckets)");
  eval->add_option("--out", eval_out, "write the JSON report here instead of stdout");

  // stats
  std::string stats_trie;
  auto* stats = app.add_subcommand("stats", "print trie statistics");
  stats->add_option("--trie", stats_trie, "trie file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (build_kb->parsed()) return cmd_build_kb(in_path, filter_path, out_path);
    if (build_trie->parsed()) {
      return cmd_build_trie(trie_kb_path, trie_mode, trie_redirects, trie_out);
    }
    if (build_alias->parsed()) {
      return cmd_build_alias(alias_mentions, alias_kb, alias_labels, alias_out);
    }
    if (align->parsed()) return cmd_align(align_links, align_kb, align_redirects, align_out);
    if (make_pairs->parsed()) {
      return cmd_make_pairs(pairs_mentions, pairs_kb, pairs_mode, pairs_seed, pairs_max_input,
                            pairs_out);
    }
    if (train_scorer->parsed()) {
      return cmd_train_scorer(scorer_pairs, lambda_copy, add_k, scorer_out);
    }
    if (link_cmd->parsed()) {
      if (link_top_k >= 0) link_opt.top_k = static_cast<std::size_t>(link_top_k);
      return cmd_link(link_opt);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_preds, eval_gold, eval_buckets, eval_kb, eval_alias, eval_out);
    }
    if (stats->parsed()) return cmd_stats(stats_trie);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what();
    try {
      std::rethrow_if_nested(e);
    } catch (const std::exception& nested) {
      std::cerr << ": " << nested.what();
    } catch (...) {
    }
    std::cerr << "\n";
    return 1;
  }
  return 0;
}
