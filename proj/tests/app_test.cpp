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


#include <cstdlib>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "app/pipeline.hpp"
#include "app/run_config.hpp"
#include "common/error.hpp"
#include "test_util.hpp"

namespace medex {
namespace {

std::string ErrorOf(const std::string &toml) {
  try {
    ParseRunConfig(toml, "run.toml", "/base");
  } catch (const Error &e) {
    return e.what();
  }
  return "";
}

TEST(RunConfigTest, DefaultsFollowThePublishedRecipe) {
  const RunConfig c = ParseRunConfig("[kb]\npath = \"kb.jsonl\"\n", "run.toml", "/base");
  EXPECT_EQ(c.kb.max_term_len, 7u);
  EXPECT_EQ(c.kb.min_test_count, 10u);
  EXPECT_EQ(c.kb.top_k, 10000u);
  EXPECT_DOUBLE_EQ(c.train.adam.learning_rate, 1e-5);
  EXPECT_EQ(c.train.batch_size, 20u);
  EXPECT_EQ(c.train.epochs, 1u);
  EXPECT_DOUBLE_EQ(c.pretrain.mask_prob, 0.15);
  EXPECT_DOUBLE_EQ(c.model.head_init_mean, -0.1);
  EXPECT_DOUBLE_EQ(c.model.head_init_std, 0.11);
  EXPECT_EQ(c.eval.bins, (std::vector<size_t>{0, 500, 2500, 50000}));
  EXPECT_EQ(c.eval.annotator_entities, 15u);
  EXPECT_EQ(c.eval.annotator_docs, 1500u);
  EXPECT_EQ(c.kb.path, "/base/kb.jsonl");
}

TEST(RunConfigTest, UnknownKeysAndSectionsAreRejected) {
  EXPECT_NE(ErrorOf("[kb]\npath = \"k\"\n[train]\nlearning_rat = 1e-4\n").find("learning_rat"),
            std::string::npos);
  EXPECT_NE(ErrorOf("[kb]\npath = \"k\"\n[optimizer]\nx = 1\n").find("[optimizer]"),
            std::string::npos);
  EXPECT_NE(ErrorOf("sede = 1\n[kb]\npath = \"k\"\n").find("sede"), std::string::npos);
}

TEST(RunConfigTest, TypeAndRangeErrors) {
  EXPECT_NE(ErrorOf("[kb]\npath = 3\n").find("path must be a string"), std::string::npos);
  EXPECT_NE(ErrorOf("[kb]\npath = \"k\"\ntop_k = -1\n").find("top_k"), std::string::npos);
  EXPECT_NE(ErrorOf("[kb]\npath = \"k\"\n[eval]\nbins = [5, 5]\n").find("bins"),
            std::string::npos);
  EXPECT_NE(ErrorOf("[kb]\npath = \"k\"\n[model]\nd_model = 30\nn_heads = 4\n")
                .find("divisible"),
            std::string::npos);
  EXPECT_NE(ErrorOf("[kb]\npath = \"k\"\n[eval]\naveraging = \"weighted\"\n").find("macro"),
            std::string::npos);
  EXPECT_NE(ErrorOf("seed = 1\n").find("path is required"), std::string::npos);
}

TEST(RunConfigTest, SeedReachesEveryStage) {
  const RunConfig c =
      ParseRunConfig("seed = 42\n[kb]\npath = \"k\"\n", "run.toml", "");
  EXPECT_EQ(c.gen.seed, 42u);
  EXPECT_EQ(c.model.seed, 42u);
  EXPECT_EQ(c.pretrain.seed, 42u);
  EXPECT_EQ(c.train.seed, 42u);
}

TEST(RunConfigTest, EnvironmentSeedOverride) {
  testing::TempDir dir;
  const std::string path = dir.Write("run.toml", "seed = 5\n[kb]\npath = \"kb.jsonl\"\n");
  ::setenv("MEDEX_SEED", "77", 1);
  const RunConfig c = LoadRunConfig(path);
  ::setenv("MEDEX_SEED", "x7", 1);
  EXPECT_THROW(LoadRunConfig(path), Error);
  ::unsetenv("MEDEX_SEED");
  EXPECT_EQ(c.seed, 77u);
  EXPECT_EQ(c.train.seed, 77u);
  EXPECT_EQ(c.kb.path, dir.File("kb.jsonl"));
  EXPECT_EQ(LoadRunConfig(path).seed, 5u);
}

TEST(RunConfigTest, DumpParsesBackToTheSameConfig) {
  const RunConfig a = LoadRunConfig(testing::SourcePath("configs/paper.toml"));
  const std::string text = DumpRunConfig(a);
  const RunConfig b = ParseRunConfig(text, "dump", "");
  EXPECT_EQ(DumpRunConfig(b), text);
  EXPECT_DOUBLE_EQ(b.train.adam.learning_rate, 1e-4);
  EXPECT_EQ(b.model.d_model, 128u);
  EXPECT_EQ(b.gen.n_docs, 20000u);
}

TEST(AnnotatorTest, ZeroRatesCopyGoldWithinTheSubset) {
  const std::vector<LabelSet> gold = {{"1", {"a", "b"}}, {"2", {"c"}}, {"3", {}}};
  const auto out = SimulateAnnotator(gold, {"a", "c"}, 0.0, 0.0, 1);
  EXPECT_EQ(out, (std::vector<LabelSet>{{"1", {"a"}}, {"2", {"c"}}, {"3", {}}}));
  const auto all_wrong = SimulateAnnotator(gold, {"a", "c"}, 1.0, 1.0, 1);
  EXPECT_EQ(all_wrong, (std::vector<LabelSet>{{"1", {"c"}}, {"2", {"a"}}, {"3", {"a", "c"}}}));
}

TEST(AnnotatorTest, RatesAreRealized) {
  std::vector<LabelSet> gold;
  for (int i = 0; i < 20000; ++i) {
    gold.push_back({fmt::format("d{}", i), i % 2 == 0 ? std::set<std::string>{"a"}
                                                      : std::set<std::string>{}});
  }
  const auto out = SimulateAnnotator(gold, {"a"}, 0.1, 0.02, 9);
  size_t missed = 0, added = 0;
  for (size_t i = 0; i < out.size(); ++i) {
    const bool has = out[i].entity_ids.count("a") != 0;
    if (i % 2 == 0 && !has) ++missed;
    if (i % 2 == 1 && has) ++added;
  }
  // Binomial standard deviations are about 30 and 14.
  EXPECT_NEAR(missed, 1000.0, 150.0);
  EXPECT_NEAR(added, 200.0, 70.0);
}

TEST(ClassSelectionTest, TopKThenTestFrequency) {
  const KnowledgeBase kb = KnowledgeBase::FromEntities({{"a", "alpha", "g", {}, {}},
                                                        {"b", "beta", "g", {}, {}},
                                                        {"c", "gamma", "g", {}, {}},
                                                        {"d", "delta", "g", {}, {}}});
  const EntityCounts train = {{"a", 5}, {"b", 9}, {"c", 9}, {"d", 1}};
  const EntityCounts test = {{"a", 3}, {"b", 0}, {"c", 2}};
  const KnowledgeBase top = SelectClasses(kb, train, &test, 3, 1);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top.entities()[0].id, "a");
  EXPECT_EQ(top.entities()[1].id, "c");
  EXPECT_EQ(SelectClasses(kb, train, nullptr, 10, 1).size(), 4u);
  EXPECT_THROW(SelectClasses(kb, train, &test, 3, 100), Error);
  EXPECT_EQ(MostFrequent(kb, train, 3), (std::vector<std::string>{"b", "c", "a"}));
}

TEST(PipelineTest, SmokeRunIsReproducible) {
  testing::TempDir dir;
  const RunConfig config = LoadRunConfig(testing::SourcePath("configs/smoke.toml"));
  const PipelineResult a = RunPipeline(config, dir.File("a"), {});
  const PipelineResult b = RunPipeline(config, dir.File("b"), {});
  EXPECT_EQ(a.outputs, b.outputs);
  EXPECT_EQ(ReadFile(a.manifest_path), ReadFile(b.manifest_path));
  for (const char *name : {"recall.csv", "discrepancy.csv", "model.ckpt", "manifest.json",
                           "test_preds.jsonl", "stats.csv", "recall_plot.tsv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.File(std::string("a/") + name))) << name;
  }
  EXPECT_EQ(a.n_classes, 20u);
  EXPECT_EQ(a.discrepancy.size(), 15u);
  // The generator audit makes distant labels exact on clean mentions.
  EXPECT_DOUBLE_EQ(a.distant_vs_gold.precision(), 1.0);

  RunConfig other = config;
  other.ApplySeed(config.seed + 1);
  const PipelineResult c = RunPipeline(other, dir.File("c"), {});
  EXPECT_NE(a.outputs.at("model.ckpt"), c.outputs.at("model.ckpt"));
}

}  // namespace
}  // namespace medex
