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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "app/pipeline.hpp"
#include "app/run_config.hpp"
#include "common/io.hpp"
#include "eval/eval.hpp"
#include "kb/kb.hpp"
#include "kb/lexicon.hpp"
#include "labeler/labeler.hpp"
#include "model/checkpoint.hpp"
#include "model/model.hpp"
#include "model/tokenizer.hpp"
#include "model_oracles.hpp"
#include "oracles.hpp"
#include "synthgen/synthgen.hpp"
#include "test_util.hpp"

namespace medex {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

EncodedSequence Seq(std::vector<int32_t> ids, size_t max_len) {
  EncodedSequence s;
  s.ids = ids;
  s.mask.assign(ids.size(), 1);
  s.ids.resize(max_len, Tokenizer::kPad);
  s.mask.resize(max_len, 0);
  return s;
}

std::string RandomText(std::mt19937_64 &rng, const std::vector<std::string> &vocab,
                       size_t n) {
  std::string text;
  for (size_t i = 0; i < n; ++i) text += vocab[rng() % vocab.size()] + " ";
  return text;
}

const std::vector<std::string> kVocab = {
    "pain", "in", "lumbar", "spine", "of", "the", "heart", "cough", "dry", "left",
    "right", "knee", "acute", "chronic", "fever", "mild", "upper", "lower", "back", "chest",
    "swelling", "joint", "abdominal", "nausea", "severe", "region", "neck", "rash"};

Outcome LabelerOracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2026);
  const KnowledgeBase kb = testing::RandomKb(rng, 200, kVocab);
  const NormalizationPipeline pipeline;
  const NormalizedLexicon lexicon = BuildLexicon(kb, pipeline, kDefaultMaxTermLen, nullptr);
  size_t mismatches = 0, labels = 0;
  for (int d = 0; d < 1000; ++d) {
    const NormalizedDocument doc =
        pipeline.Normalize(fmt::format("d{}", d), RandomText(rng, kVocab, 20 + rng() % 80));
    const auto got = LabelDocument(doc, lexicon).entity_ids;
    labels += got.size();
    if (got != testing::BruteForceLabels(doc.tokens, kb, pipeline, kDefaultMaxTermLen)) {
      ++mismatches;
    }
  }
  const double secs = Seconds(start);
  return {mismatches == 0 && labels > 0 && secs < 30,
          fmt::format("1000 docs, 200 entities, {} labels, {} mismatches, {:.1f}s", labels,
                      mismatches, secs)};
}

Outcome WindowRule() {
  const KnowledgeBase kb = KnowledgeBase::FromEntities(
      {Entity{"E7", "a b c d e f g", "G", {"a b c d e f g"}, {}},
       Entity{"E8", "h i j k l m n o", "G", {"h i j k l m n o"}, {}}});
  const NormalizedLexicon lexicon = BuildLexicon(kb, {}, kDefaultMaxTermLen, nullptr);
  const std::vector<std::string> filler = {"x", "y", "z", "w"};
  std::mt19937_64 rng(7);
  size_t hits7 = 0, hits8 = 0;
  const int n = 500;
  for (int d = 0; d < n; ++d) {
    const std::string text = RandomText(rng, filler, rng() % 10) + "a b c d e f g " +
                             RandomText(rng, filler, rng() % 10) + "h i j k l m n o " +
                             RandomText(rng, filler, rng() % 10);
    const auto labels = LabelDocument(Normalize(text, {}), lexicon).entity_ids;
    hits7 += labels.count("E7");
    hits8 += labels.count("E8");
  }
  return {hits7 == n && hits8 == 0,
          fmt::format("7-token matched {}/{}, 8-token matched {}/{}", hits7, n, hits8, n)};
}

ModelConfig GradConfig() {
  ModelConfig c;
  c.vocab_size = 16;
  c.d_model = 8;
  c.n_layers = 1;
  c.n_heads = 2;
  c.ffn_dim = 16;
  c.max_seq_len = 12;
  c.n_entities = 5;
  c.seed = 3;
  return c;
}

Parameters<double> Perturbed(const ModelConfig &c, uint64_t seed) {
  auto p = InitParameters<double>(c);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (auto &[name, m] : p.Named()) {
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] += noise(rng);
  }
  return p;
}

Outcome GradientCheck() {
  const auto start = Clock::now();
  const ModelConfig c = GradConfig();
  std::string detail;
  bool pass = true;

  auto p = Perturbed(c, 8);
  const std::vector<EncodedSequence> batch = {
      Seq({2, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14}, 12), Seq({2, 15, 4, 1}, 12)};
  const std::vector<std::vector<size_t>> targets = {{0, 2}, {2}};
  const auto w = BatchClassWeights(targets, c.n_entities, 0.05);
  auto grads = Parameters<double>::Zeros(c);
  ClassifierLoss<double>(p, c, batch, targets, w, &grads);
  const auto cls = testing::CheckGradients(&p, grads, [&] {
    return ClassifierLoss<double>(p, c, batch, targets, w, nullptr);
  }, 1e-5);
  pass = pass && cls.checked == p.NumValues() && cls.max_rel_error < 1e-4;
  detail += fmt::format("classifier {} values max rel {:.2e}", cls.checked, cls.max_rel_error);

  auto q = Perturbed(c, 9);
  const MaskedSequence s{Seq({2, 4, 3, 6, 3, 8, 9, 10, 11, 12, 13, 14}, 12), {{2, 5}, {4, 7}}};
  const MaskedSequence t{Seq({2, 3, 9}, 12), {{1, 10}}};
  auto mlm_grads = Parameters<double>::Zeros(c);
  MlmLoss<double>(q, c, {s, t}, &mlm_grads, nullptr);
  const auto mlm = testing::CheckGradients(&q, mlm_grads, [&] {
    return MlmLoss<double>(q, c, {s, t}, nullptr, nullptr);
  }, 1e-5);
  pass = pass && mlm.checked == q.NumValues() && mlm.max_rel_error < 1e-4;
  detail += fmt::format(", mlm {} values max rel {:.2e}", mlm.checked, mlm.max_rel_error);

  const double secs = Seconds(start);
  pass = pass && secs < 120;
  return {pass, detail + fmt::format(", {:.1f}s", secs)};
}

Outcome AdamOracle() {
  const AdamConfig cfg{1e-3, 0.9, 0.999, 1e-8};
  double p = 0.5, m = 0, v = 0;
  const double g = -0.37;
  AdamUpdate<double>(&p, &g, &m, &v, 1, 1, cfg);
  const double m1 = (1 - cfg.beta1) * g;
  const double v1 = (1 - cfg.beta2) * g * g;
  const double m_hat = m1 / (1 - cfg.beta1);
  const double v_hat = v1 / (1 - cfg.beta2);
  const double expected = 0.5 - cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.eps);
  const double err = std::abs(p - expected);
  return {err <= 1e-12, fmt::format("|update - closed form| = {:.3e}", err)};
}

Outcome HeadInit() {
  ModelConfig c;
  c.vocab_size = 8;
  c.d_model = 128;
  c.n_layers = 1;
  c.n_heads = 2;
  c.ffn_dim = 8;
  c.max_seq_len = 8;
  c.n_entities = 782;
  c.seed = 11;
  const auto state = InitModel<float>(c);
  const auto &w = state.params.head_w;
  const double n = static_cast<double>(w.size());
  double mean = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) mean += w.data()[i];
  mean /= n;
  double var = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) var += std::pow(w.data()[i] - mean, 2);
  const double std = std::sqrt(var / (n - 1));
  return {w.size() >= 100000 && std::abs(mean + 0.1) <= 0.005 && std::abs(std - 0.11) <= 0.005,
          fmt::format("{} weights, mean {:.5f}, std {:.5f}", w.size(), mean, std)};
}

struct SyntheticSetup {
  RunConfig config;
  KnowledgeBase kb;
  NormalizationPipeline pipeline;
  TemplateSet templates;
};

SyntheticSetup LoadSetup() {
  const RunConfig config = LoadRunConfig(testing::SourcePath("configs/paper.toml"));
  return {config, LoadKnowledgeBase(config.kb.path),
          NormalizationPipeline::Load(config.kb.abbrev, config.kb.lemmas),
          LoadTemplates(config.gen.template_file)};
}

Outcome Masking() {
  std::mt19937_64 rng(1);
  size_t eligible = 0, masked = 0;
  std::vector<int32_t> ids = {2};
  for (int i = 0; i < 99; ++i) ids.push_back(4 + i % 10);
  const EncodedSequence seq = Seq(ids, 128);
  while (eligible < 100000) {
    masked += MaskTokens(seq, 0.15, rng).targets.size();
    eligible += 99;
  }
  const double rate = static_cast<double>(masked) / eligible;

  const SyntheticSetup setup = LoadSetup();
  GenConfig gen;
  gen.seed = 5;
  gen.n_docs = 2000;
  const GoldCorpus corpus = GenerateCorpus(setup.kb, setup.templates, gen, setup.pipeline);
  std::vector<TokenList> docs;
  for (const auto &d : corpus.documents) docs.push_back(setup.pipeline.NormalizeTokens(d.text));
  // Same model and pretraining settings as the end-to-end run, for 200 steps.
  ModelConfig c = setup.config.model;
  const Tokenizer tok = Tokenizer::Build(docs, setup.config.min_token_freq, c.max_seq_len);
  std::vector<EncodedSequence> encoded;
  for (const auto &d : docs) encoded.push_back(tok.Encode(d));
  c.vocab_size = tok.size();
  c.n_entities = 4;
  auto state = InitModel<float>(c);
  PretrainConfig pc = setup.config.pretrain;
  pc.steps = 200;
  const auto losses = MlmPretrain(&state, encoded, pc);
  double first = 0, last = 0;
  if (losses.size() >= 40) {
    first = std::accumulate(losses.begin(), losses.begin() + 20, 0.0) / 20;
    last = std::accumulate(losses.end() - 20, losses.end(), 0.0) / 20;
  }
  return {std::abs(rate - 0.15) <= 0.005 && losses.size() == 200 && last < 0.8 * first,
          fmt::format("mask rate {:.4f} over {} draws; mlm loss {:.3f} -> {:.3f} ({} steps)",
                      rate, eligible, first, last, losses.size())};
}

Outcome FrequencyRecall() {
  const auto start = Clock::now();
  const RunConfig config = LoadRunConfig(testing::SourcePath("configs/paper.toml"));
  testing::TempDir dir;
  const PipelineResult result = RunPipeline(config, dir.path(), nullptr);
  const double secs = Seconds(start);
  std::vector<const RecallRow *> all;
  for (const RecallRow &row : result.recall) {
    if (row.group == kAllGroups) all.push_back(&row);
  }
  std::string detail = fmt::format("K={}", result.n_classes);
  bool pass = result.n_classes == 50 && all.size() == 3;
  const std::array<size_t, 3> expected_bins = {0, 200, 1000};
  std::vector<double> recall;
  for (size_t i = 0; i < all.size() && i < 3; ++i) {
    const RecallRow &row = *all[i];
    pass = pass && row.bin_threshold == expected_bins[i] && row.n_entities > 0 &&
           row.recall.has_value();
    recall.push_back(row.recall.value_or(0.0));
    detail += fmt::format(", >{}: {} entities recall {:.4f}", row.bin_threshold,
                          row.n_entities, recall.back());
  }
  size_t inversions = 0;
  for (size_t i = 1; i < recall.size(); ++i) {
    if (recall[i] < recall[i - 1]) {
      ++inversions;
      pass = pass && recall[i - 1] - recall[i] <= 0.02;
    }
  }
  pass = pass && inversions <= 1 && !recall.empty() && recall.back() >= 0.90 && secs < 900;
  return {pass, detail + fmt::format(", {} inversions, {:.0f}s", inversions, secs)};
}

Outcome ZeroNoiseClosure() {
  const SyntheticSetup setup = LoadSetup();
  GenConfig gen;
  gen.seed = 13;
  gen.n_docs = 3000;
  const GoldCorpus corpus = GenerateCorpus(setup.kb, setup.templates, gen, setup.pipeline);
  const NormalizedLexicon lexicon =
      NormalizedLexicon::Build(setup.kb, setup.pipeline, kDefaultMaxTermLen, nullptr);
  const LabeledCorpus labeled = LabelCorpus(corpus.documents, lexicon, 1);
  size_t tp = 0, predicted = 0, gold = 0, oracle_mismatches = 0;
  for (size_t i = 0; i < corpus.documents.size(); ++i) {
    const auto &pred = labeled.documents[i].labels.entity_ids;
    const auto &truth = corpus.gold_labels[i].entity_ids;
    predicted += pred.size();
    gold += truth.size();
    for (const std::string &id : pred) tp += truth.count(id);
    if (i < 300 && pred != testing::BruteForceLabels(labeled.documents[i].document.tokens,
                                                     setup.kb, setup.pipeline, kDefaultMaxTermLen)) {
      ++oracle_mismatches;
    }
  }
  const double precision = predicted ? static_cast<double>(tp) / predicted : 0;
  const double recall = gold ? static_cast<double>(tp) / gold : 0;
  return {tp == predicted && tp == gold && gold > 0 && oracle_mismatches == 0,
          fmt::format("{} docs, precision {:.4f}, recall {:.4f}, brute-force mismatches {}",
                      corpus.documents.size(), precision, recall, oracle_mismatches)};
}

Outcome Discrepancy() {
  using C = DiscrepancyCase;
  // (model, annotator, gold) -> case.
  const std::array<std::pair<std::array<bool, 3>, C>, 8> table = {{
      {{true, true, true}, C::kBothTp},
      {{false, false, false}, C::kBothTn},
      {{false, true, true}, C::kHumanTp},
      {{true, false, false}, C::kHumanTn},
      {{true, false, true}, C::kModelTp},
      {{false, true, false}, C::kModelTn},
      {{true, true, false}, C::kBothWrong},
      {{false, false, true}, C::kBothWrong},
  }};
  size_t table_ok = 0;
  for (const auto &[in, want] : table) {
    table_ok += ClassifyDiscrepancy(in[0], in[1], in[2]) == want;
  }

  std::mt19937_64 rng(99);
  std::vector<std::string> entities;
  for (int e = 0; e < 12; ++e) entities.push_back(fmt::format("E{:02d}", e));
  size_t identity_failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const size_t docs = 1 + rng() % 50;
    std::vector<LabelSet> p, a, g;
    for (size_t d = 0; d < docs; ++d) {
      const std::string id = fmt::format("d{:03d}", d);
      p.push_back({id, {}});
      a.push_back({id, {}});
      g.push_back({id, {}});
      for (const std::string &e : entities) {
        if (rng() % 3 == 0) p.back().entity_ids.insert(e);
        if (rng() % 3 == 0) a.back().entity_ids.insert(e);
        if (rng() % 3 == 0) g.back().entity_ids.insert(e);
      }
    }
    const auto rows = DiscrepancyTable(p, a, g, entities);
    if (rows.size() != entities.size()) {
      ++identity_failures;
      continue;
    }
    std::array<size_t, kNumDiscrepancyCases> column{};
    size_t expected_total = 0;
    for (const DiscrepancyRow &row : rows) {
      // Independent recount of each cell from the raw triples.
      std::array<size_t, kNumDiscrepancyCases> recount{};
      for (size_t d = 0; d < docs; ++d) {
        const bool m = p[d].entity_ids.count(row.entity) != 0;
        const bool h = a[d].entity_ids.count(row.entity) != 0;
        const bool t = g[d].entity_ids.count(row.entity) != 0;
        size_t cell;
        if (m == t && h == t) {
          cell = static_cast<size_t>(t ? C::kBothTp : C::kBothTn);
        } else if (h == t) {
          cell = static_cast<size_t>(t ? C::kHumanTp : C::kHumanTn);
        } else if (m == t) {
          cell = static_cast<size_t>(t ? C::kModelTp : C::kModelTn);
        } else {
          cell = static_cast<size_t>(C::kBothWrong);
        }
        ++recount[cell];
      }
      if (recount != row.counts) ++identity_failures;
      for (size_t c = 0; c < kNumDiscrepancyCases; ++c) column[c] += row.counts[c];
      expected_total += docs;
    }
    const size_t total = std::accumulate(column.begin(), column.end(), size_t{0});
    if (total != expected_total) ++identity_failures;
  }
  return {table_ok == table.size() && identity_failures == 0,
          fmt::format("truth table {}/{}, identity failures {}/100", table_ok, table.size(),
                      identity_failures)};
}

int Shell(const std::string &command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome Determinism() {
  testing::TempDir dir;
  const std::string config = testing::SourcePath("configs/smoke.toml");
  std::vector<nlohmann::json> outputs;
  for (const char *run : {"a", "b"}) {
    const int code = Shell(fmt::format("'{}' -q pipeline --config '{}' --out-dir '{}' >/dev/null",
                                       MEDEX_BINARY, config, dir.File(run)));
    if (code != 0) return {false, fmt::format("medex pipeline exited {}", code)};
    outputs.push_back(
        nlohmann::json::parse(ReadFile(dir.File(std::string(run) + "/manifest.json")))
            .at("outputs"));
  }
  const bool same = outputs[0] == outputs[1] && !outputs[0].empty();

  const std::string path = dir.File("a/model.ckpt");
  const std::string bytes = ReadFile(path);
  const Checkpoint cp = LoadCheckpoint(path);
  SaveCheckpoint(cp, dir.File("resaved.ckpt"));
  const bool round_trip = ReadFile(dir.File("resaved.ckpt")) == bytes &&
                          LoadCheckpoint(dir.File("resaved.ckpt")) == cp;
  return {same && round_trip,
          fmt::format("{} output hashes {}, checkpoint round trip {}", outputs[0].size(),
                      same ? "identical" : "differ", round_trip ? "bit-exact" : "differs")};
}

}  // namespace
}  // namespace medex

// With arguments, runs only the listed criterion numbers.
int main(int argc, char **argv) {
  unsetenv("MEDEX_SEED");
  const std::vector<std::pair<std::string, std::function<medex::Outcome()>>> criteria = {
      {"labeler matches brute-force oracle", medex::LabelerOracle},
      {"window bound of seven tokens", medex::WindowRule},
      {"gradients match finite differences", medex::GradientCheck},
      {"adam update matches closed form", medex::AdamOracle},
      {"classifier head init statistics", medex::HeadInit},
      {"mlm masking rate and loss decrease", medex::Masking},
      {"recall rises with training frequency", medex::FrequencyRecall},
      {"zero-noise labeling closes on gold", medex::ZeroNoiseClosure},
      {"discrepancy taxonomy and counts", medex::Discrepancy},
      {"pipeline output is deterministic", medex::Determinism},
  };
  int failures = 0;
  std::set<size_t> only;
  for (int a = 1; a < argc; ++a) only.insert(std::strtoul(argv[a], nullptr, 10));
  for (size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && only.count(i + 1) == 0) continue;
    medex::Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception &e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += !outcome.pass;
    std::printf("%s %zu %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
