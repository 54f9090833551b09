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


#include "app/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <random>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "common/error.hpp"
#include "common/io.hpp"
#include "common/version.hpp"
#include "kb/lexicon.hpp"
#include "labeler/labeler.hpp"
#include "synthgen/synthgen.hpp"

namespace medex {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double Since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void Log(const LogFn &log, const std::string &line) {
  if (log) log(line);
}

StepCallback Progress(const LogFn &log, const char *what, size_t total) {
  if (!log) return {};
  const size_t every = std::max<size_t>(1, total / 10);
  return [log, what, total, every](size_t step, double loss) {
    if (step % every == 0 || step == total) {
      log(fmt::format("{} step {}/{} loss {:.4f}", what, step, total, loss));
    }
  };
}

std::vector<LabelSet> Subset(const std::vector<LabelSet> &labels,
                             const std::set<std::string> &doc_ids) {
  std::vector<LabelSet> out;
  for (const LabelSet &l : labels) {
    if (doc_ids.count(l.doc_id) != 0) out.push_back(l);
  }
  return out;
}

std::vector<LabelSet> Restrict(std::vector<LabelSet> labels, const KnowledgeBase &kb) {
  for (LabelSet &l : labels) {
    std::erase_if(l.entity_ids, [&](const std::string &id) { return kb.Find(id) == nullptr; });
  }
  return labels;
}

}  // namespace

KnowledgeBase SelectClasses(const KnowledgeBase &kb, const EntityCounts &train_counts,
                            const EntityCounts *test_counts, size_t top_k,
                            size_t min_test_count) {
  KnowledgeBase top = SelectTopEntities(kb, train_counts, std::min(top_k, kb.size()));
  if (test_counts != nullptr) top = FilterMinFrequency(top, *test_counts, min_test_count);
  if (top.empty()) {
    throw Error(ErrorCode::kValidation, "no entity passes the class selection filters");
  }
  return top;
}

Checkpoint InitCheckpoint(const RunConfig &config, const NormalizationPipeline &pipeline,
                          const std::vector<RawDocument> &train_docs,
                          const KnowledgeBase &classes) {
  std::vector<TokenList> tokens;
  tokens.reserve(train_docs.size());
  for (const RawDocument &d : train_docs) tokens.push_back(pipeline.NormalizeTokens(d.text));
  Checkpoint cp;
  cp.pipeline = pipeline;
  cp.tokenizer = Tokenizer::Build(tokens, config.min_token_freq, config.model.max_seq_len);
  for (const Entity &e : classes.entities()) cp.entities.push_back(e.id);
  ModelConfig mc = config.model;
  mc.vocab_size = cp.tokenizer.size();
  mc.n_entities = cp.entities.size();
  cp.state = InitModel<float>(mc);
  return cp;
}

std::vector<EncodedSequence> EncodeDocuments(const Checkpoint &checkpoint,
                                             const std::vector<RawDocument> &docs) {
  std::vector<EncodedSequence> out;
  out.reserve(docs.size());
  for (const RawDocument &d : docs) {
    out.push_back(checkpoint.tokenizer.Encode(checkpoint.pipeline.NormalizeTokens(d.text)));
  }
  return out;
}

std::vector<double> PretrainCheckpoint(Checkpoint *checkpoint,
                                       const std::vector<RawDocument> &docs,
                                       const PretrainConfig &config, const LogFn &log) {
  std::vector<double> losses;
  if (config.steps > 0) {
    losses = MlmPretrain(&checkpoint->state, EncodeDocuments(*checkpoint, docs), config,
                         Progress(log, "pretrain", config.steps));
  }
  ResetOptimizer(&checkpoint->state);
  return losses;
}

std::vector<double> TrainCheckpoint(Checkpoint *checkpoint,
                                    const std::vector<RawDocument> &docs,
                                    const std::vector<LabelSet> &labels,
                                    const TrainConfig &config, const LogFn &log) {
  std::map<std::string, size_t> class_index;
  for (size_t i = 0; i < checkpoint->entities.size(); ++i) {
    class_index[checkpoint->entities[i]] = i;
  }
  std::map<std::string, const LabelSet *> by_doc;
  for (const LabelSet &l : labels) by_doc[l.doc_id] = &l;
  const std::vector<EncodedSequence> inputs = EncodeDocuments(*checkpoint, docs);
  std::vector<TrainExample> data;
  data.reserve(docs.size());
  for (size_t i = 0; i < docs.size(); ++i) {
    auto it = by_doc.find(docs[i].doc_id);
    if (it == by_doc.end()) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("document \"{}\" has no label set", docs[i].doc_id));
    }
    TrainExample ex{inputs[i], {}};
    for (const std::string &id : it->second->entity_ids) {
      auto c = class_index.find(id);
      if (c != class_index.end()) ex.targets.push_back(c->second);
    }
    data.push_back(std::move(ex));
  }
  const size_t steps =
      config.epochs * ((data.size() + config.batch_size - 1) / config.batch_size);
  return TrainClassifier(&checkpoint->state, data, config, Progress(log, "train", steps));
}

std::vector<LabelSet> PredictDocuments(const Checkpoint &checkpoint,
                                       const std::vector<RawDocument> &docs,
                                       double threshold, size_t workers) {
  const auto classes =
      PredictBatch(checkpoint.state, EncodeDocuments(checkpoint, docs), threshold, workers);
  std::vector<LabelSet> out;
  out.reserve(docs.size());
  for (size_t i = 0; i < docs.size(); ++i) {
    LabelSet l{docs[i].doc_id, {}};
    for (size_t c : classes[i]) l.entity_ids.insert(checkpoint.entities[c]);
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<LabelSet> SimulateAnnotator(const std::vector<LabelSet> &gold,
                                        const std::vector<std::string> &entities,
                                        double miss_rate, double false_positive_rate,
                                        uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<LabelSet> out;
  out.reserve(gold.size());
  for (const LabelSet &g : gold) {
    LabelSet a{g.doc_id, {}};
    for (const std::string &id : entities) {
      // One draw per cell keeps the stream aligned whatever the gold says.
      const double draw = u(rng);
      const bool present = g.entity_ids.count(id) != 0;
      if (present ? draw >= miss_rate : draw < false_positive_rate) a.entity_ids.insert(id);
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<std::string> MostFrequent(const KnowledgeBase &classes,
                                      const EntityCounts &train_counts, size_t n) {
  std::vector<std::pair<size_t, std::string>> ranked;
  for (const Entity &e : classes.entities()) {
    auto it = train_counts.find(e.id);
    ranked.emplace_back(it == train_counts.end() ? 0 : it->second, e.id);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> out;
  for (size_t i = 0; i < std::min(n, ranked.size()); ++i) out.push_back(ranked[i].second);
  return out;
}

PipelineResult RunPipeline(const RunConfig &config, const std::string &out_dir,
                           const LogFn &log) {
  config.Validate();
  if (config.gen.template_file.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "[gen] templates is required");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo,
                fmt::format("cannot create output directory {}: {}", out_dir, ec.message()));
  }
  auto path = [&](const std::string &name) {
    return (std::filesystem::path(out_dir) / name).string();
  };
  const Clock::time_point start = Clock::now();
  PipelineResult result;

  const KnowledgeBase kb = LoadKnowledgeBase(config.kb.path);
  const NormalizationPipeline pipeline =
      NormalizationPipeline::Load(config.kb.abbrev, config.kb.lemmas);
  std::vector<std::string> warnings;
  const NormalizedLexicon lexicon =
      NormalizedLexicon::Build(kb, pipeline, config.kb.max_term_len, &warnings);
  for (const std::string &w : warnings) Log(log, "lexicon: " + w);
  lexicon.Save(path("lexicon.json"));
  WriteFile(path("config.toml"), DumpRunConfig(config));
  Log(log, fmt::format("kb: {} entities, {} lexicon keys", kb.size(), lexicon.size()));

  Clock::time_point t = Clock::now();
  const GoldCorpus corpus = GenerateCorpus(kb, LoadTemplates(config.gen.template_file),
                                           config.gen, pipeline);
  const auto [train, test] = SplitCorpus(corpus, config.train_fraction, config.seed);
  WriteGoldCorpus(train, out_dir, "train_");
  WriteGoldCorpus(test, out_dir, "test_");
  Log(log, fmt::format("gen: {} train / {} test documents ({:.1f}s)", train.documents.size(),
                       test.documents.size(), Since(t)));

  t = Clock::now();
  const std::vector<LabelSet> train_labels =
      ExtractLabels(LabelCorpus(train.documents, lexicon, config.workers));
  const std::vector<LabelSet> test_labels =
      ExtractLabels(LabelCorpus(test.documents, lexicon, config.workers));
  WriteLabels(path("train_labels.jsonl"), train_labels);
  WriteLabels(path("test_labels.jsonl"), test_labels);
  const EntityCounts train_counts = CountDocuments(train_labels);
  const EntityCounts test_counts = CountDocuments(test_labels);
  WriteCounts(path("train_counts.tsv"), train_counts);
  WriteCounts(path("test_counts.tsv"), test_counts);
  result.distant_vs_gold = CompareLabels(test_labels, test.gold_labels);
  Log(log, fmt::format("label: distant vs gold on test, precision {:.4f} recall {:.4f} ({:.1f}s)",
                       result.distant_vs_gold.precision(), result.distant_vs_gold.recall(),
                       Since(t)));

  const KnowledgeBase classes = SelectClasses(kb, train_counts, &test_counts,
                                              config.kb.top_k, config.kb.min_test_count);
  SaveKnowledgeBase(classes, path("classes.jsonl"));
  result.n_classes = classes.size();
  result.stats =
      CorpusStats(Restrict(train_labels, classes), Restrict(test_labels, classes), classes);
  EmitReport(result.stats, ReportFormat::kCsv, path("stats.csv"));
  Log(log, fmt::format("classes: {} selected", classes.size()));

  t = Clock::now();
  Checkpoint cp = InitCheckpoint(config, pipeline, train.documents, classes);
  PretrainCheckpoint(&cp, train.documents, config.pretrain, log);
  TrainCheckpoint(&cp, train.documents, train_labels, config.train, log);
  SaveCheckpoint(cp, path("model.ckpt"));
  Log(log, fmt::format("model: vocab {}, {} steps ({:.1f}s)", cp.tokenizer.size(),
                       cp.state.step, Since(t)));

  const std::vector<LabelSet> preds =
      PredictDocuments(cp, test.documents, config.eval.threshold, config.workers);
  WriteLabels(path("test_preds.jsonl"), preds);
  result.recall = RecallByBin(preds, test_labels, train_counts, config.eval.bins, classes,
                              config.eval.averaging);
  EmitReport(result.recall, ReportFormat::kCsv, path("recall.csv"));
  EmitReport(result.recall, ReportFormat::kPlotData, path("recall_plot.tsv"));
  for (const RecallRow &row : result.recall) {
    if (row.group != kAllGroups) continue;
    Log(log, fmt::format("recall >{}: {} entities, {}", row.bin_threshold, row.n_entities,
                         row.recall ? fmt::format("{:.4f}", *row.recall) : "-"));
  }

  // Annotation sample: a seeded subset of test documents against the
  // generator's gold labels.
  std::vector<std::string> doc_ids;
  for (const RawDocument &d : test.documents) doc_ids.push_back(d.doc_id);
  std::mt19937_64 rng(config.seed);
  std::shuffle(doc_ids.begin(), doc_ids.end(), rng);
  doc_ids.resize(std::min(doc_ids.size(), config.eval.annotator_docs));
  const std::set<std::string> sample(doc_ids.begin(), doc_ids.end());
  const std::vector<std::string> frequent =
      MostFrequent(classes, train_counts, config.eval.annotator_entities);
  const std::vector<LabelSet> sample_gold = Subset(test.gold_labels, sample);
  const std::vector<LabelSet> annotator =
      SimulateAnnotator(sample_gold, frequent, config.eval.annotator_miss_rate,
                        config.eval.annotator_false_positive_rate, config.seed);
  WriteLabels(path("annotator.jsonl"), annotator);
  result.discrepancy = DiscrepancyTable(Subset(preds, sample), annotator, sample_gold, frequent);
  DescribeEntities(&result.discrepancy, classes, train_counts);
  EmitReport(result.discrepancy, ReportFormat::kCsv, path("discrepancy.csv"));

  for (const auto &entry : std::filesystem::directory_iterator(out_dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name != "manifest.json") {
      result.outputs[name] = FileSha256(entry.path().string());
    }
  }
  json inputs = json::object();
  auto input = [&](const char *key, const std::string &p) {
    if (!p.empty()) inputs[key] = {{"path", p}, {"sha256", FileSha256(p)}};
  };
  input("config", config.source);
  input("kb", config.kb.path);
  input("abbrev", config.kb.abbrev);
  input("lemmas", config.kb.lemmas);
  input("templates", config.gen.template_file);
  json recall = json::array();
  for (const RecallRow &row : result.recall) {
    if (row.group != kAllGroups) continue;
    recall.push_back({{"bin", row.bin_threshold},
                      {"n_entities", row.n_entities},
                      {"recall", row.recall ? json(*row.recall) : json(nullptr)}});
  }
  const json manifest = {
      {"tool", "medex"},
      {"version", kVersion},
      {"seed", config.seed},
      {"inputs", std::move(inputs)},
      {"versions",
       {{"kb", kb.version()},
        {"lexicon", lexicon.Version()},
        {"normalization", pipeline.Version()}}},
      {"counts",
       {{"train_docs", train.documents.size()},
        {"test_docs", test.documents.size()},
        {"classes", classes.size()},
        {"vocab", cp.tokenizer.size()},
        {"train_steps", cp.state.step}}},
      {"metrics",
       {{"recall_all", std::move(recall)},
        {"distant_vs_gold_precision", result.distant_vs_gold.precision()},
        {"distant_vs_gold_recall", result.distant_vs_gold.recall()}}},
      {"outputs", result.outputs}};
  result.manifest_path = path("manifest.json");
  WriteFile(result.manifest_path, manifest.dump(2) + "\n");
  Log(log, fmt::format("done in {:.1f}s, manifest {}", Since(start), result.manifest_path));
  return result;
}

}  // namespace medex
