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

#include "labeler/labeler.hpp"

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "common/error.hpp"
#include "oracles.hpp"

namespace medex {
namespace {

const std::vector<std::string> kVocab = {"pain", "in", "lumbar", "spine", "of",
                                         "the", "heart", "cough", "dry", "left"};

NormalizedDocument Doc(const std::string &text,
                       const NormalizationPipeline &p = {}) {
  return p.Normalize("d", text);
}

TEST(CandidateWindowsTest, Counts) {
  EXPECT_EQ(CandidateWindows(3, 7).size(), 6u);
  EXPECT_EQ(CandidateWindows(10, 7).size(), 49u);
  EXPECT_TRUE(CandidateWindows(0, 7).empty());
  EXPECT_THROW(CandidateWindows(3, 0), Error);
}

TEST(CandidateWindowsTest, OrderedByStartThenLength) {
  auto spans = CandidateWindows(3, 2);
  std::vector<Span> expected = {{0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 1}};
  EXPECT_EQ(spans, expected);
}

TEST(LabelDocumentTest, ExactFourGram) {
  auto kb = KnowledgeBase::FromEntities(
      {Entity{"E1", "pain in lumbar spine", "G", {"pain in lumbar spine"}, {}}});
  auto lex = BuildLexicon(kb, {}, 7, nullptr);
  auto labels = LabelDocument(Doc("complaints of pain in lumbar spine, mild"), lex);
  EXPECT_EQ(labels.entity_ids, std::set<std::string>{"E1"});
  EXPECT_TRUE(LabelDocument(Doc("pain in the lumbar spine"), lex).entity_ids.empty());
}

TEST(LabelDocumentTest, SetSemanticsAndNestedMatches) {
  auto kb = KnowledgeBase::FromEntities(
      {Entity{"E1", "pain", "G", {"pain"}, {}},
       Entity{"E2", "chest pain", "G", {"chest pain"}, {}}});
  auto lex = BuildLexicon(kb, {}, 7, nullptr);
  auto doc = Doc("pain. chest pain and pain again");
  EXPECT_EQ(LabelDocument(doc, lex).entity_ids,
            (std::set<std::string>{"E1", "E2"}));
  auto matches = FindMatches(doc, lex);
  EXPECT_EQ(matches.size(), 4u);
}

TEST(LabelDocumentTest, NegationIsNotHandled) {
  auto kb = KnowledgeBase::FromEntities({Entity{"E1", "headache", "G", {"headache"}, {}}});
  auto lex = BuildLexicon(kb, {}, 7, nullptr);
  EXPECT_EQ(LabelDocument(Doc("no headache"), lex).entity_ids.size(), 1u);
}

TEST(LabelDocumentTest, WindowBound) {
  auto kb = KnowledgeBase::FromEntities(
      {Entity{"E7", "a b c d e f g", "G", {"a b c d e f g"}, {}},
       Entity{"E8", "h i j k l m n o", "G", {"h i j k l m n o"}, {}}});
  auto lex = BuildLexicon(kb, {}, 7, nullptr);
  auto labels = LabelDocument(Doc("x a b c d e f g y h i j k l m n o z"), lex);
  EXPECT_EQ(labels.entity_ids, std::set<std::string>{"E7"});
}

TEST(LabelDocumentPropertyTest, MatchesBruteForceOracle) {
  std::mt19937_64 rng(11);
  auto pipeline = NormalizationPipeline::Create({{"lsp", "lumbar spine"}},
                                                {{"pains", "pain"}});
  std::vector<std::string> doc_vocab = kVocab;
  doc_vocab.push_back("lsp");
  doc_vocab.push_back("Pains,");
  for (int trial = 0; trial < 1000; ++trial) {
    if (trial % 100 == 0) rng.seed(trial);
    auto kb = testing::RandomKb(rng, 20, kVocab);
    const size_t max_len = 1 + rng() % 8;
    std::vector<std::string> warnings;
    auto lex = BuildLexicon(kb, pipeline, max_len, &warnings);
    std::string text;
    const size_t n = rng() % 40;
    for (size_t i = 0; i < n; ++i) text += doc_vocab[rng() % doc_vocab.size()] + " ";
    auto doc = pipeline.Normalize("d", text);
    EXPECT_EQ(LabelDocument(doc, lex).entity_ids,
              testing::BruteForceLabels(doc.tokens, kb, pipeline, max_len))
        << text;
  }
}

TEST(LabelDocumentPropertyTest, AddingSynonymNeverRemovesEntities) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto kb = testing::RandomKb(rng, 10, kVocab);
    std::vector<Entity> extended = kb.entities();
    const std::string extra = kVocab[rng() % kVocab.size()] + " " +
                              kVocab[rng() % kVocab.size()] + " extra";
    extended[rng() % extended.size()].synonyms.push_back(extra);
    auto kb2 = KnowledgeBase::FromEntities(extended);
    auto lex1 = BuildLexicon(kb, {}, 7, nullptr);
    auto lex2 = BuildLexicon(kb2, {}, 7, nullptr);
    std::string text;
    for (int i = 0; i < 30; ++i) text += kVocab[rng() % kVocab.size()] + " ";
    text += extra;
    auto before = LabelDocument(Doc(text), lex1).entity_ids;
    auto after = LabelDocument(Doc(text), lex2).entity_ids;
    EXPECT_TRUE(std::includes(after.begin(), after.end(), before.begin(), before.end()));
  }
}

class LabelCorpusTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(21);
    kb_ = testing::RandomKb(rng, 30, kVocab);
    lex_ = BuildLexicon(kb_, {}, 7, nullptr);
    for (int i = 0; i < 300; ++i) {
      std::string text;
      for (int k = 0; k < 25; ++k) text += kVocab[rng() % kVocab.size()] + " ";
      docs_.push_back(RawDocument{"doc" + std::to_string(1000 + i), text, ""});
    }
  }

  KnowledgeBase kb_;
  NormalizedLexicon lex_;
  std::vector<RawDocument> docs_;
};

TEST_F(LabelCorpusTest, EmptyAndSingle) {
  EXPECT_TRUE(LabelCorpus({}, lex_, 4).documents.empty());
  auto one = LabelCorpus({docs_[0]}, lex_, 1);
  ASSERT_EQ(one.documents.size(), 1u);
  EXPECT_EQ(one.documents[0].labels,
            LabelDocument(lex_.pipeline().Normalize(docs_[0].doc_id, docs_[0].text),
                          lex_));
}

TEST_F(LabelCorpusTest, ParallelEqualsSerialAndIsSorted) {
  LabelRunSummary summary;
  auto serial = ExtractLabels(LabelCorpus(docs_, lex_, 1, &summary));
  EXPECT_EQ(summary.documents, docs_.size());
  EXPECT_TRUE(std::is_sorted(serial.begin(), serial.end(),
                             [](const LabelSet &a, const LabelSet &b) {
                               return a.doc_id < b.doc_id;
                             }));
  for (size_t workers : {2, 3, 8}) {
    EXPECT_EQ(SerializeLabels(ExtractLabels(LabelCorpus(docs_, lex_, workers))),
              SerializeLabels(serial));
  }
}

TEST_F(LabelCorpusTest, PermutationSafe) {
  auto reference = ExtractLabels(LabelCorpus(docs_, lex_, 1));
  std::mt19937 rng(2);
  auto shuffled = docs_;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  EXPECT_EQ(ExtractLabels(LabelCorpus(shuffled, lex_, 3)), reference);
}

TEST_F(LabelCorpusTest, DuplicateDocIdRejected) {
  auto docs = docs_;
  docs.push_back(docs_[5]);
  EXPECT_THROW(LabelCorpus(docs, lex_, 1), Error);
}

}  // namespace
}  // namespace medex
