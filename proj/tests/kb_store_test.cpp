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

#include "mel/kb_store.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"

using namespace mel;

namespace {

EntityRecord make_record(const std::string& id,
                         std::vector<std::tuple<std::string, std::string, std::uint64_t>> names) {
  EntityRecord record;
  record.id = EntityId(id);
  for (auto& [lang, name, count] : names) {
    record.names[LanguageCode(lang)] = name;
    if (count > 0) record.mention_counts[LanguageCode(lang)] = count;
  }
  return record;
}

}  // namespace

TEST_CASE("ingest drops nameless records and excluded classes") {
  EntityRecord nameless;
  nameless.id = EntityId("Q1");
  nameless.mention_counts[LanguageCode("en")] = 5;

  EntityRecord category = make_record("Q2", {{"en", "Category:Things", 0}});
  category.classes.push_back(EntityId("Q4167836"));

  EntityRecord kept = make_record("Q3", {{"en", "Thing", 1}});

  const KnowledgeBase kb = KnowledgeBase::ingest({nameless, category, kept},
                                                 {EntityId("Q4167836")});
  CHECK(kb.entities().size() == 1);
  CHECK(kb.contains(EntityId("Q3")));
  CHECK(!kb.contains(EntityId("Q1")));
  CHECK(!kb.contains(EntityId("Q2")));
}

TEST_CASE("ingest honours external class memberships") {
  const EntityRecord record = make_record("Q5", {{"en", "Help page", 0}});
  const std::map<EntityId, std::set<EntityId>> memberships = {
      {EntityId("Q5"), {EntityId("Q14204246")}}};
  const KnowledgeBase kb =
      KnowledgeBase::ingest({record}, {EntityId("Q14204246")}, memberships);
  CHECK(kb.entities().empty());
}

TEST_CASE("ingest counts and indexes three plain records") {
  const KnowledgeBase kb = KnowledgeBase::ingest({
      make_record("Q1", {{"en", "Rome", 3}, {"it", "Roma", 9}}),
      make_record("Q2", {{"en", "Paris", 2}}),
      make_record("Q3", {{"de", "Berlin", 1}}),
  });
  CHECK(kb.entities().size() == 3);
  CHECK(kb.resolve("Rome", LanguageCode("en")) == std::set<EntityId>{EntityId("Q1")});
  CHECK(kb.resolve("Roma", LanguageCode("it")) == std::set<EntityId>{EntityId("Q1")});
  CHECK(kb.global_lang_counts().at(LanguageCode("en")) == 5);
  CHECK(kb.global_lang_counts().at(LanguageCode("it")) == 9);
}

TEST_CASE("ingest rejects duplicate entity ids") {
  CHECK_THROWS_AS(KnowledgeBase::ingest({make_record("Q1", {{"en", "A", 0}}),
                                         make_record("Q1", {{"en", "B", 0}})}),
                  DuplicateEntity);
}

TEST_CASE("canonical_name picks the language with most mentions") {
  const KnowledgeBase kb = KnowledgeBase::ingest({
      make_record("Q1", {{"en", "X", 5}, {"fr", "Y", 3}}),
  });
  const auto [lang, name] = kb.canonical_name(EntityId("Q1"));
  CHECK(lang.value() == "en");
  CHECK(name == "X");
}

TEST_CASE("canonical_name breaks ties by global language counts") {
  const KnowledgeBase kb = KnowledgeBase::ingest({
      make_record("Q1", {{"en", "X", 3}, {"fr", "Y", 3}}),
      make_record("Q2", {{"en", "Filler", 97}, {"fr", "Bourrage", 47}}),
  });
  // en global: 3+97=100, fr global: 3+47=50.
  const auto [lang, name] = kb.canonical_name(EntityId("Q1"));
  CHECK(lang.value() == "en");
  CHECK(name == "X");
}

TEST_CASE("canonical_name falls back to the smallest language code") {
  const KnowledgeBase kb = KnowledgeBase::ingest({
      make_record("Q1", {{"de", "A", 0}, {"it", "B", 0}}),
      make_record("Q2", {{"de", "C", 7}, {"it", "D", 7}}),
  });
  const auto [lang, name] = kb.canonical_name(EntityId("Q1"));
  CHECK(lang.value() == "de");
  CHECK(name == "A");
}

TEST_CASE("canonical_name ignores counts for nameless languages") {
  EntityRecord record = make_record("Q1", {{"fr", "Nom", 1}});
  record.mention_counts[LanguageCode("en")] = 100;  // no en name
  const KnowledgeBase kb = KnowledgeBase::ingest({record});
  CHECK(kb.canonical_name(EntityId("Q1")).first.value() == "fr");
}

TEST_CASE("resolve unions across languages and returns empty for misses") {
  KnowledgeBase kb = KnowledgeBase::ingest({
      make_record("Q1", {{"en", "X", 0}}),
      make_record("Q2", {{"de", "X", 0}}),
  });
  CHECK(kb.resolve("X") == std::set<EntityId>{EntityId("Q1"), EntityId("Q2")});
  CHECK(kb.resolve("X", LanguageCode("en")) == std::set<EntityId>{EntityId("Q1")});
  CHECK(kb.resolve("missing", LanguageCode("en")).empty());
}

TEST_CASE("resolve covers redirects, resolve_primary does not") {
  EntityRecord record = make_record("Q1", {{"en", "Primary", 0}});
  record.redirects[LanguageCode("en")] = {"Alias"};
  const KnowledgeBase kb = KnowledgeBase::ingest({record});
  CHECK(kb.resolve("Alias", LanguageCode("en")) == std::set<EntityId>{EntityId("Q1")});
  CHECK(!kb.resolve_primary("Alias", LanguageCode("en")).has_value());
  CHECK(kb.resolve_primary("Primary", LanguageCode("en")) == EntityId("Q1"));
}

TEST_CASE("identifiers with and without redirects") {
  EntityRecord record = make_record("Q1", {{"en", "X", 0}});
  record.redirects[LanguageCode("en")] = {"X2"};
  const KnowledgeBase kb = KnowledgeBase::ingest({record});

  const auto with = kb.identifiers(EntityId("Q1"), true);
  CHECK(with == std::set<std::pair<LanguageCode, std::string>>{
                    {LanguageCode("en"), "X"}, {LanguageCode("en"), "X2"}});
  const auto without = kb.identifiers(EntityId("Q1"), false);
  CHECK(without ==
        std::set<std::pair<LanguageCode, std::string>>{{LanguageCode("en"), "X"}});

  const KnowledgeBase kb3 = KnowledgeBase::ingest({
      make_record("Q9", {{"en", "A", 0}, {"de", "B", 0}, {"fr", "C", 0}}),
  });
  CHECK(kb3.identifiers(EntityId("Q9"), true).size() == 3);
}

TEST_CASE("unknown entity lookups throw") {
  const KnowledgeBase kb = KnowledgeBase::ingest({make_record("Q1", {{"en", "X", 0}})});
  CHECK_THROWS_AS(kb.canonical_name(EntityId("Q404")), UnknownEntity);
  CHECK_THROWS_AS(kb.identifiers(EntityId("Q404"), true), UnknownEntity);
}

TEST_CASE("every identifier resolves back to its entity (property)") {
  std::mt19937 rng(6);
  std::vector<EntityRecord> records;
  const char* langs[] = {"en", "de", "fr", "ja"};
  for (int e = 0; e < 40; ++e) {
    EntityRecord record;
    record.id = EntityId("Q" + std::to_string(e));
    const int lang_count = 1 + static_cast<int>(rng() % 4);
    for (int l = 0; l < lang_count; ++l) {
      const LanguageCode lang(langs[l]);
      record.names[lang] = "name-" + std::to_string(rng() % 50);
      if (rng() % 2) record.redirects[lang].insert("alias-" + std::to_string(rng() % 50));
      record.mention_counts[lang] = rng() % 10;
    }
    records.push_back(std::move(record));
  }
  const KnowledgeBase kb = KnowledgeBase::ingest(records);
  for (const auto& [id, record] : kb.entities()) {
    for (const auto& [lang, name] : kb.identifiers(id, true)) {
      const auto resolved = kb.resolve(name, lang);
      CHECK(resolved.count(id) == 1);
    }
    // canonical name is one of the primary identifiers
    const auto canonical = kb.canonical_name(id);
    CHECK(kb.identifiers(id, false).count(canonical) == 1);
  }

  // global counts are the per-entity sums
  std::map<LanguageCode, std::uint64_t> sums;
  for (const auto& [id, record] : kb.entities()) {
    for (const auto& [lang, count] : record.mention_counts) sums[lang] += count;
  }
  CHECK(sums == kb.global_lang_counts());
}

TEST_CASE("ingest is order independent") {
  std::vector<EntityRecord> records = {
      make_record("Q1", {{"en", "A", 1}}),
      make_record("Q2", {{"de", "B", 2}}),
      make_record("Q3", {{"fr", "C", 3}}),
  };
  const KnowledgeBase forward = KnowledgeBase::ingest(records);
  std::reverse(records.begin(), records.end());
  const KnowledgeBase backward = KnowledgeBase::ingest(records);

  std::ostringstream a, b;
  forward.save(a);
  backward.save(b);
  CHECK(a.str() == b.str());
}

TEST_CASE("kb binary round-trip") {
  EntityRecord record = make_record("Q1", {{"en", "Zürich thing", 4}, {"ja", "チューリッヒ", 2}});
  record.redirects[LanguageCode("en")] = {"Zurich alias", "ZH"};
  const KnowledgeBase kb = KnowledgeBase::ingest({record, make_record("Q2", {{"en", "Other", 0}})});

  std::stringstream buffer;
  kb.save(buffer);
  const KnowledgeBase loaded = KnowledgeBase::load(buffer);
  CHECK(loaded.entities().size() == 2);
  CHECK(loaded.identifiers(EntityId("Q1"), true) == kb.identifiers(EntityId("Q1"), true));
  CHECK(loaded.global_lang_counts() == kb.global_lang_counts());

  std::ostringstream again;
  loaded.save(again);
  CHECK(again.str() == buffer.str());
}

TEST_CASE("kb load rejects corrupt and mismatched files") {
  std::stringstream buffer;
  KnowledgeBase::ingest({make_record("Q1", {{"en", "X", 0}})}).save(buffer);
  const std::string bytes = buffer.str();

  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(KnowledgeBase::load(truncated), CorruptFile);

  std::string wrong_version = bytes;
  wrong_version[7] = '9';
  std::stringstream versioned(wrong_version);
  CHECK_THROWS_AS(KnowledgeBase::load(versioned), VersionMismatch);

  std::stringstream garbage("not a kb file at all");
  CHECK_THROWS_AS(KnowledgeBase::load(garbage), CorruptFile);
}

TEST_CASE("jsonl reader normalizes, validates, and reports line numbers") {
  std::stringstream in(
      R"({"id": "Q1", "names": {"en": "Café"}, "redirects": {"en": ["Café"]}, "counts": {"en": 2}})"
      "\n"
      R"({"id": "Q2", "names": {"fr": "Autre"}})"
      "\n");
  const auto records = read_kb_jsonl(in);
  REQUIRE(records.size() == 2);
  // Decomposed redirect normalizes to the precomposed primary and is then
  // dropped at ingest as a duplicate of the title.
  const KnowledgeBase kb = KnowledgeBase::ingest(records);
  CHECK(kb.identifiers(EntityId("Q1"), true) ==
        std::set<std::pair<LanguageCode, std::string>>{{LanguageCode("en"), "Café"}});

  std::stringstream bad("{\"names\": {}}\n");
  CHECK_THROWS_AS(read_kb_jsonl(bad), MalformedRecord);

  std::stringstream bad_line2("{\"id\": \"Q1\"}\nnot json\n");
  try {
    read_kb_jsonl(bad_line2);
    FAIL("expected MalformedRecord");
  } catch (const MalformedRecord& e) {
    CHECK(e.line == 2);
  }

  std::stringstream bad_lang(R"({"id": "Q1", "names": {"EN": "X"}})");
  CHECK_THROWS_AS(read_kb_jsonl(bad_lang), MalformedRecord);

  std::stringstream bad_count(R"({"id": "Q1", "names": {"en": "X"}, "counts": {"en": -1}})");
  CHECK_THROWS_AS(read_kb_jsonl(bad_count), MalformedRecord);
}

TEST_CASE("filter list reader skips comments and blanks") {
  std::stringstream in("# wikimedia internals\nQ4167836\n\n  Q11266439  \n");
  const auto filter = read_filter_list(in);
  CHECK(filter == std::set<EntityId>{EntityId("Q4167836"), EntityId("Q11266439")});
}
