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

#include "mel/corpus.hpp"

#include <algorithm>
#include <istream>
#include <random>

#include "mel/unicode.hpp"

namespace mel {

namespace {

// Splits one TSV line into exactly `fields` columns, NFC-normalizing each.
std::vector<std::string> split_tsv(const std::string& line, std::size_t fields,
                                   std::size_t line_no) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  if (out.size() != fields) {
    throw MalformedLine(line_no, "expected " + std::to_string(fields) + " tab-separated fields, got " +
                                     std::to_string(out.size()));
  }
  for (std::string& field : out) {
    try {
      field = nfc(field);
    } catch (const std::invalid_argument& e) {
      throw MalformedLine(line_no, e.what());
    }
  }
  return out;
}

LanguageCode parse_lang(const std::string& text, std::size_t line_no) {
  if (!LanguageCode::valid(text)) {
    throw MalformedLine(line_no, "invalid language code '" + text + "'");
  }
  return LanguageCode(text);
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(line, line_no);
  }
}

}  // namespace

std::vector<MentionInstance> load_mentions(std::istream& in) {
  std::vector<MentionInstance> out;
  for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    const std::vector<std::string> fields = split_tsv(line, 5, line_no);
    MentionInstance inst;
    inst.lang = parse_lang(fields[0], line_no);
    inst.left = fields[1];
    inst.mention = fields[2];
    inst.right = fields[3];
    if (inst.mention.empty()) throw MalformedLine(line_no, "empty mention");
    if (!fields[4].empty()) inst.gold = EntityId(fields[4]);
    out.push_back(std::move(inst));
  });
  return out;
}

std::vector<RawHyperlink> load_hyperlinks(std::istream& in) {
  std::vector<RawHyperlink> out;
  for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    const std::vector<std::string> fields = split_tsv(line, 5, line_no);
    RawHyperlink link;
    link.lang = parse_lang(fields[0], line_no);
    link.left = fields[1];
    link.mention = fields[2];
    link.right = fields[3];
    link.target_title = fields[4];
    if (link.mention.empty()) throw MalformedLine(line_no, "empty mention");
    if (link.target_title.empty()) throw MalformedLine(line_no, "empty target title");
    out.push_back(std::move(link));
  });
  return out;
}

RedirectMap load_redirects(std::istream& in) {
  RedirectMap out;
  for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    const std::vector<std::string> fields = split_tsv(line, 3, line_no);
    const LanguageCode lang = parse_lang(fields[0], line_no);
    if (fields[1].empty() || fields[2].empty()) {
      throw MalformedLine(line_no, "empty redirect title");
    }
    out[{lang, fields[1]}] = fields[2];
  });
  return out;
}

std::pair<std::vector<MentionInstance>, AlignmentStats> align_hyperlinks(
    const std::vector<RawHyperlink>& links, const KnowledgeBase& kb,
    const RedirectMap& redirects) {
  std::vector<MentionInstance> instances;
  AlignmentStats stats;
  for (const RawHyperlink& link : links) {
    std::optional<EntityId> gold;

    if (auto primary = kb.resolve_primary(link.target_title, link.lang)) {
      gold = *primary;
      ++stats.direct;
    } else if (auto redirected = redirects.find({link.lang, link.target_title});
               redirected != redirects.end()) {
      if (auto via = kb.resolve_primary(redirected->second, link.lang)) {
        gold = *via;
        ++stats.via_redirect;
      }
    }

    if (!gold) {
      const std::set<EntityId> matches = kb.resolve(link.target_title);
      if (matches.size() == 1) {
        gold = *matches.begin();
        ++stats.via_search;
      } else if (matches.size() > 1) {
        ++stats.dropped_ambiguous;
        continue;
      } else {
        ++stats.dropped_unresolved;
        continue;
      }
    }

    instances.push_back(
        MentionInstance{link.lang, link.left, link.mention, link.right, std::move(gold)});
  }
  return {std::move(instances), stats};
}

ScorerInput build_input(const MentionInstance& inst, int max_tokens) {
  if (max_tokens < 1) throw std::invalid_argument("max_tokens must be positive");
  const TokenSequence mention = tokenize(inst.mention);
  const TokenSequence core = tokenize(std::string(kMentionStartMarker) + " " + inst.mention +
                                      " " + std::string(kMentionEndMarker));
  const auto budget = static_cast<std::size_t>(max_tokens);
  if (core.size() > budget) throw MentionTooLong(core.size(), budget);

  const TokenSequence left = tokenize(inst.left);
  const TokenSequence right = tokenize(inst.right);
  const TokenId space = tokenize(" ")[0];

  // Trim the outer ends alternately, left first, skipping exhausted sides.
  // The joining space of a side disappears with its last token.
  std::size_t left_begin = 0;
  std::size_t right_end = right.size();
  const auto total = [&] {
    const std::size_t left_len = left.size() - left_begin;
    const std::size_t right_len = right_end;
    return left_len + (left_len == 0 ? 0 : 1) + core.size() + (right_len == 0 ? 0 : 1) +
           right_len;
  };
  bool trim_left = true;
  while (total() > budget) {
    const bool can_left = left_begin < left.size();
    const bool can_right = right_end > 0;
    if ((trim_left && can_left) || !can_right) {
      ++left_begin;
    } else {
      --right_end;
    }
    trim_left = !trim_left;
  }

  TokenSequence context;
  context.reserve(total());
  context.insert(context.end(), left.begin() + static_cast<std::ptrdiff_t>(left_begin),
                 left.end());
  if (left_begin < left.size()) context.push_back(space);
  context.insert(context.end(), core.begin(), core.end());
  if (right_end > 0) context.push_back(space);
  context.insert(context.end(), right.begin(),
                 right.begin() + static_cast<std::ptrdiff_t>(right_end));

  return ScorerInput{std::move(context), std::move(mention)};
}

std::vector<std::pair<ScorerInput, TokenSequence>> training_pairs(
    const std::vector<MentionInstance>& instances, const KnowledgeBase& kb, RenderMode mode,
    std::uint64_t rng_seed, int max_tokens) {
  std::mt19937_64 rng(rng_seed);
  std::vector<std::pair<ScorerInput, TokenSequence>> out;

  for (const MentionInstance& inst : instances) {
    if (!inst.gold) continue;
    const EntityRecord& record = kb.entity(*inst.gold);
    if (record.names.empty()) throw EntityHasNoNames(*inst.gold);

    const ScorerInput input = build_input(inst, max_tokens);

    if (const auto it = record.names.find(inst.lang); it != record.names.end()) {
      out.emplace_back(input, tokenize(render(inst.lang, it->second, mode)));
      continue;
    }

    // No source-language name: sample up to five alternative languages
    // without replacement. A partial Fisher-Yates over the sorted language
    // list keeps the draw reproducible across platforms.
    std::vector<LanguageCode> langs;
    langs.reserve(record.names.size());
    for (const auto& [lang, name] : record.names) {
      (void)name;
      langs.push_back(lang);
    }
    const std::size_t take = std::min<std::size_t>(5, langs.size());
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (langs.size() - i));
      std::swap(langs[i], langs[j]);
    }
    std::vector<LanguageCode> chosen(langs.begin(), langs.begin() + static_cast<std::ptrdiff_t>(take));
    std::sort(chosen.begin(), chosen.end());
    for (const LanguageCode& lang : chosen) {
      out.emplace_back(input, tokenize(render(lang, record.names.at(lang), mode)));
    }
  }
  return out;
}

}  // namespace mel
