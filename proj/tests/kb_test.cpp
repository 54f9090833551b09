// Copyright 2026 The Medex Authors.
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

#include "kb/kb.hpp"

#include <algorithm>
#include <random>
#include <set>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "common/error.hpp"
#include "kb/lexicon.hpp"
#include "test_util.hpp"

namespace medex {
namespace {

std::string Record(const std::string &id, const std::string &name,
                   const std::string &group,
                   const std::vector<std::string> &synonyms) {
  std::string syn;
  for (size_t i = 0; i < synonyms.size(); ++i) {
    if (i > 0) syn += ", ";
    syn += "\"" + synonyms[i] + "\"";
  }
  return fmt::format(R"({{"id": "{}", "name": "{}", "group": "{}", "synonyms": [{}]}})",
                     id, name, group, syn) +
         "\n";
}

std::set<std::string> Ids(const KnowledgeBase &kb) {
  std::set<std::string> ids;
  for (const Entity &e : kb.entities()) ids.insert(e.id);
  return ids;
}

KnowledgeBase Letters(const std::vector<std::string> &ids) {
  std::vector<Entity> entities;
  for (const std::string &id : ids) {
    entities.push_back(Entity{id, "term " + id, "G", {"term " + id}, {}});
  }
  return KnowledgeBase::FromEntities(entities);
}

TEST(LoadKbTest, WellFormedFile) {
  testing::TempDir dir;
  auto path = dir.Write("kb.jsonl",
                        "# test kb\n" +
                            Record("C1", "pain", "Sign or Symptom", {"pain", "ache"}) +
                            "\n" +
                            Record("C2", "cough", "Sign or Symptom", {"coughing"}));
  KnowledgeBase kb = LoadKnowledgeBase(path);
  ASSERT_EQ(kb.size(), 2u);
  EXPECT_EQ(kb.Find("C1")->synonyms, (std::vector<std::string>{"pain", "ache"}));
  // Canonical name is added when missing.
  EXPECT_EQ(kb.Find("C2")->synonyms,
            (std::vector<std::string>{"cough", "coughing"}));
  EXPECT_EQ(kb.Groups(), std::vector<std::string>{"Sign or Symptom"});
}

TEST(LoadKbTest, SharedSynonymNamesBothIds) {
  testing::TempDir dir;
  auto path = dir.Write("kb.jsonl", Record("E1", "ache", "G", {"pain"}) +
                                        Record("E2", "sore", "G", {"Pain"}));
  try {
    LoadKnowledgeBase(path);
    FAIL() << "expected collision";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    EXPECT_NE(std::string(e.what()).find("E1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("E2"), std::string::npos);
  }
}

TEST(LoadKbTest, ParseErrorCarriesLineNumber) {
  testing::TempDir dir;
  auto path = dir.Write("kb.jsonl", Record("E1", "a", "G", {"a"}) + "{not json\n");
  try {
    LoadKnowledgeBase(path);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}

TEST(LoadKbTest, DuplicateIdAndEmptySynonym) {
  testing::TempDir dir;
  EXPECT_THROW(LoadKnowledgeBase(dir.Write(
                   "a.jsonl", Record("E1", "a", "G", {"a"}) +
                                  Record("E1", "b", "G", {"b"}))),
               Error);
  EXPECT_THROW(LoadKnowledgeBase(dir.Write("b.jsonl",
                                           Record("E1", "a", "G", {"a", ""}))),
               Error);
  EXPECT_THROW(LoadKnowledgeBase(dir.Write(
                   "c.jsonl", R"({"id": "E1", "name": "a", "group": "G", "synonyms": []})")),
               Error);
}

TEST(LoadKbTest, TenThousandEntities) {
  testing::TempDir dir;
  std::string content;
  for (int i = 0; i < 10000; ++i) {
    content += Record(fmt::format("C{:05d}", i), fmt::format("term {}", i), "G",
                      {fmt::format("term {}", i), fmt::format("alias {}", i)});
  }
  KnowledgeBase kb = LoadKnowledgeBase(dir.Write("kb.jsonl", content));
  EXPECT_EQ(kb.size(), 10000u);
}

TEST(BuildLexiconTest, SynonymPassesThroughPipeline) {
  auto kb = KnowledgeBase::FromEntities({Entity{"E1", "Pains", "G", {"Pains"}, {}}});
  auto pipeline = NormalizationPipeline::Create({}, {{"pains", "pain"}});
  auto lex = BuildLexicon(kb, pipeline, 7, nullptr);
  ASSERT_EQ(lex.size(), 1u);
  EXPECT_EQ(lex.entries()[0].key, "pain");
  TokenList key{"pain"};
  ASSERT_NE(lex.Find(key), nullptr);
  EXPECT_EQ(*lex.Find(key), "E1");
}

TEST(BuildLexiconTest, LongSynonymSkippedWithWarning) {
  auto kb = KnowledgeBase::FromEntities(
      {Entity{"E1", "a b c d e f g h", "G", {"a b c d e f g h", "a b"}, {}}});
  std::vector<std::string> warnings;
  auto lex = BuildLexicon(kb, NormalizationPipeline(), 7, &warnings);
  EXPECT_EQ(lex.size(), 1u);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("a b c d e f g h"), std::string::npos);
}

TEST(BuildLexiconTest, CaseVariantsCollapse) {
  auto kb = KnowledgeBase::FromEntities(
      {Entity{"E1", "Back Pain", "G", {"Back Pain", "back pain"}, {}}});
  EXPECT_EQ(BuildLexicon(kb, NormalizationPipeline(), 7, nullptr).size(), 1u);
}

TEST(BuildLexiconTest, PostNormalizationCollisionIsAnError) {
  auto kb = KnowledgeBase::FromEntities({Entity{"E1", "pains", "G", {"pains"}, {}},
                                         Entity{"E2", "pain", "G", {"pain"}, {}}});
  auto pipeline = NormalizationPipeline::Create({}, {{"pains", "pain"}});
  EXPECT_THROW(BuildLexicon(kb, pipeline, 7, nullptr), Error);
}

TEST(BuildLexiconTest, RejectsZeroMaxTermLen) {
  EXPECT_THROW(BuildLexicon(Letters({"a"}), NormalizationPipeline(), 0, nullptr),
               Error);
}

TEST(BuildLexiconTest, SaveLoadRoundTrip) {
  testing::TempDir dir;
  auto kb = KnowledgeBase::FromEntities(
      {Entity{"E1", "complete blood count", "Lab", {"complete blood count"}, {}},
       Entity{"E2", "headache", "Sign", {"headache", "head pains"}, {}}});
  auto pipeline = NormalizationPipeline::Create(
      {{"cbc", "complete blood count"}, {"ha", "headache"}}, {{"pains", "pain"}});
  auto lex = BuildLexicon(kb, pipeline, 7, nullptr);
  lex.Save(dir.File("lex.json"));
  auto loaded = NormalizedLexicon::Load(dir.File("lex.json"));
  EXPECT_TRUE(loaded == lex);
  EXPECT_EQ(loaded.Version(), lex.Version());
  EXPECT_EQ(loaded.pipeline().NormalizeTokens("CBC"),
            (TokenList{"complete", "blood", "count"}));
}

TEST(BuildLexiconTest, DeterministicAndKeysAreFixedPoints) {
  auto kb = KnowledgeBase::FromEntities(
      {Entity{"E1", "Head Pains", "G", {"Head Pains", "HA"}, {}},
       Entity{"E2", "lumbar pain", "G", {"Pain, lumbar", "l-spine pain"}, {}}});
  auto pipeline =
      NormalizationPipeline::Create({{"ha", "headache"}}, {{"pains", "pain"}});
  auto a = BuildLexicon(kb, pipeline, 7, nullptr);
  auto b = BuildLexicon(kb, pipeline, 7, nullptr);
  EXPECT_EQ(a.Serialize(), b.Serialize());
  for (const auto &entry : a.entries()) {
    EXPECT_EQ(JoinTokens(pipeline.NormalizeTokens(entry.key)), entry.key);
  }
}

TEST(SelectTopTest, TopK) {
  auto kb = Letters({"a", "b", "c"});
  EXPECT_EQ(Ids(SelectTopEntities(kb, {{"a", 5}, {"b", 3}, {"c", 1}}, 2)),
            (std::set<std::string>{"a", "b"}));
}

TEST(SelectTopTest, LexicographicTieBreak) {
  auto kb = Letters({"b", "a"});
  EXPECT_EQ(Ids(SelectTopEntities(kb, {{"a", 5}, {"b", 5}}, 1)),
            (std::set<std::string>{"a"}));
}

TEST(SelectTopTest, LargeKAndExactTenThousand) {
  std::vector<std::string> ids;
  EntityCounts counts;
  for (int i = 0; i < 12000; ++i) {
    ids.push_back(fmt::format("C{:05d}", i));
    counts[ids.back()] = (i * 7919) % 500;
  }
  auto kb = Letters(ids);
  EXPECT_EQ(SelectTopEntities(kb, counts, 10000).size(), 10000u);
  EXPECT_EQ(SelectTopEntities(kb, counts, 20000).size(), 12000u);
  EXPECT_THROW(SelectTopEntities(kb, counts, 0), Error);
}

TEST(FilterMinFrequencyTest, Inclusive) {
  auto kb = Letters({"a", "b"});
  EXPECT_EQ(Ids(FilterMinFrequency(kb, {{"a", 10}, {"b", 9}}, 10)),
            (std::set<std::string>{"a"}));
  EXPECT_EQ(FilterMinFrequency(kb, {}, 0).size(), 2u);
}

TEST(KbPropertyTest, TopKNestedAndFilterMonotone) {
  std::mt19937 rng(3);
  std::vector<std::string> ids;
  for (int i = 0; i < 60; ++i) ids.push_back(fmt::format("e{:02d}", i));
  auto kb = Letters(ids);
  for (int trial = 0; trial < 100; ++trial) {
    EntityCounts counts;
    for (const auto &id : ids) {
      if (rng() % 5 != 0) counts[id] = rng() % 20;
    }
    const size_t k1 = 1 + rng() % 60;
    const size_t k2 = k1 + rng() % (61 - k1);
    auto small = Ids(SelectTopEntities(kb, counts, k1));
    auto large = Ids(SelectTopEntities(kb, counts, k2));
    EXPECT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end()));
    const size_t m1 = rng() % 20;
    const size_t m2 = m1 + rng() % 5;
    auto loose = Ids(FilterMinFrequency(kb, counts, m1));
    auto strict = Ids(FilterMinFrequency(kb, counts, m2));
    EXPECT_TRUE(std::includes(loose.begin(), loose.end(), strict.begin(), strict.end()));
  }
}

}  // namespace
}  // namespace medex
