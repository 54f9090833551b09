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


#include "medex/medex.h"

#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "app/pipeline.hpp"
#include "app/run_config.hpp"
#include "common/error.hpp"
#include "common/io.hpp"
#include "common/records.hpp"
#include "common/version.hpp"
#include "eval/eval.hpp"
#include "kb/kb.hpp"
#include "kb/lexicon.hpp"
#include "labeler/labeler.hpp"
#include "model/checkpoint.hpp"
#include "synthgen/synthgen.hpp"

struct medex_kb {
  medex::KnowledgeBase kb;
};

struct medex_lexicon {
  medex::NormalizedLexicon lexicon;
  std::vector<std::string> warnings;
};

struct medex_config {
  medex::RunConfig config;
};

struct medex_model {
  medex::Checkpoint checkpoint;
};

struct medex_run {
  medex::PipelineResult result;
  std::vector<std::pair<std::string, std::string>> outputs;
};

namespace {

thread_local std::string last_error;

std::mutex log_mu;
medex_log_fn log_fn = nullptr;
void *log_user = nullptr;

void LogLine(const std::string &line) {
  std::lock_guard<std::mutex> lock(log_mu);
  if (log_fn != nullptr) log_fn(line.c_str(), log_user);
}

medex::LogFn Logger() {
  std::lock_guard<std::mutex> lock(log_mu);
  if (log_fn == nullptr) return {};
  return LogLine;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
medex_status Guard(Fn &&fn) {
  try {
    fn();
    last_error.clear();
    return MEDEX_OK;
  } catch (const medex::Error &e) {
    last_error = e.what();
    return static_cast<medex_status>(e.code());
  } catch (const std::bad_alloc &) {
    last_error = "out of memory";
  } catch (const std::exception &e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return MEDEX_ERR_INTERNAL;
}

void Require(bool ok, const char *what) {
  if (!ok) throw medex::Error(medex::ErrorCode::kInvalidArgument, what);
}

std::string Opt(const char *s) { return s == nullptr ? std::string() : std::string(s); }

void WriteOut(const char *out_path, const std::string &text) {
  Require(out_path != nullptr, "output path is NULL");
  if (std::string(out_path) == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  medex::WriteFile(out_path, text);
}

medex::NormalizationPipeline PipelineFor(const medex::RunConfig &c) {
  return medex::NormalizationPipeline::Load(c.kb.abbrev, c.kb.lemmas);
}

}  // namespace

extern "C" {

const char *medex_version(void) { return medex::kVersion; }

const char *medex_status_name(medex_status status) {
  switch (status) {
    case MEDEX_OK:
      return "ok";
    case MEDEX_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case MEDEX_ERR_IO:
      return "i/o error";
    case MEDEX_ERR_PARSE:
      return "parse error";
    case MEDEX_ERR_VALIDATION:
      return "validation error";
    case MEDEX_ERR_CHECKSUM:
      return "checksum mismatch";
    case MEDEX_ERR_VERSION:
      return "unsupported version";
    case MEDEX_ERR_SHAPE_MISMATCH:
      return "shape mismatch";
    case MEDEX_ERR_NUMERIC:
      return "numeric failure";
    case MEDEX_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char *medex_last_error(void) { return last_error.c_str(); }

void medex_set_log(medex_log_fn fn, void *user) {
  std::lock_guard<std::mutex> lock(log_mu);
  log_fn = fn;
  log_user = user;
}

medex_status medex_kb_load(const char *path, medex_kb **out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "NULL argument");
    auto h = std::make_unique<medex_kb>();
    h->kb = medex::LoadKnowledgeBase(path);
    *out = h.release();
  });
}

size_t medex_kb_size(const medex_kb *kb) { return kb == nullptr ? 0 : kb->kb.size(); }

void medex_kb_free(medex_kb *kb) { delete kb; }

medex_status medex_lexicon_build(const medex_kb *kb, const char *abbrev_path,
                                 const char *lemma_path, size_t max_term_len,
                                 medex_lexicon **out) {
  return Guard([&] {
    Require(kb != nullptr && out != nullptr, "NULL argument");
    auto h = std::make_unique<medex_lexicon>();
    const auto pipeline = medex::NormalizationPipeline::Load(Opt(abbrev_path), Opt(lemma_path));
    h->lexicon = medex::NormalizedLexicon::Build(kb->kb, pipeline, max_term_len, &h->warnings);
    *out = h.release();
  });
}

medex_status medex_lexicon_load(const char *path, medex_lexicon **out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "NULL argument");
    auto h = std::make_unique<medex_lexicon>();
    h->lexicon = medex::NormalizedLexicon::Load(path);
    *out = h.release();
  });
}

medex_status medex_lexicon_save(const medex_lexicon *lexicon, const char *path) {
  return Guard([&] {
    Require(lexicon != nullptr && path != nullptr, "NULL argument");
    lexicon->lexicon.Save(path);
  });
}

size_t medex_lexicon_size(const medex_lexicon *lexicon) {
  return lexicon == nullptr ? 0 : lexicon->lexicon.size();
}

size_t medex_lexicon_warning_count(const medex_lexicon *lexicon) {
  return lexicon == nullptr ? 0 : lexicon->warnings.size();
}

const char *medex_lexicon_warning(const medex_lexicon *lexicon, size_t i) {
  if (lexicon == nullptr || i >= lexicon->warnings.size()) return nullptr;
  return lexicon->warnings[i].c_str();
}

void medex_lexicon_free(medex_lexicon *lexicon) { delete lexicon; }

medex_status medex_label_file(const medex_lexicon *lexicon, const char *corpus_path,
                              const char *labels_path, size_t workers, size_t *n_docs) {
  return Guard([&] {
    Require(lexicon != nullptr && corpus_path != nullptr && labels_path != nullptr,
            "NULL argument");
    Require(workers >= 1, "workers must be >= 1");
    medex::LabelRunSummary summary;
    const auto corpus =
        medex::LabelCorpus(medex::ReadCorpus(corpus_path), lexicon->lexicon, workers, &summary);
    medex::WriteLabels(labels_path, medex::ExtractLabels(corpus));
    LogLine(fmt::format("labeled {} documents with {} workers in {:.2f}s", summary.documents,
                        summary.workers, summary.seconds));
    if (n_docs != nullptr) *n_docs = summary.documents;
  });
}

medex_status medex_count_labels(const char *labels_path, const char *counts_path) {
  return Guard([&] {
    Require(labels_path != nullptr && counts_path != nullptr, "NULL argument");
    const auto counts = medex::CountDocuments(medex::ReadLabels(labels_path));
    WriteOut(counts_path, medex::SerializeCounts(counts));
  });
}

medex_status medex_config_load(const char *path, medex_config **out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "NULL argument");
    auto h = std::make_unique<medex_config>();
    h->config = medex::LoadRunConfig(path);
    *out = h.release();
  });
}

uint64_t medex_config_seed(const medex_config *config) {
  return config == nullptr ? 0 : config->config.seed;
}

medex_status medex_config_set_seed(medex_config *config, uint64_t seed) {
  return Guard([&] {
    Require(config != nullptr, "NULL argument");
    config->config.ApplySeed(seed);
  });
}

medex_status medex_config_set_workers(medex_config *config, size_t workers) {
  return Guard([&] {
    Require(config != nullptr, "NULL argument");
    Require(workers >= 1, "workers must be >= 1");
    config->config.workers = workers;
  });
}

medex_status medex_config_set_kb_path(medex_config *config, const char *path) {
  return Guard([&] {
    Require(config != nullptr && path != nullptr, "NULL argument");
    config->config.kb.path = path;
  });
}

void medex_config_free(medex_config *config) { delete config; }

medex_status medex_generate(const medex_config *config, const char *out_dir, size_t *n_docs) {
  return Guard([&] {
    Require(config != nullptr && out_dir != nullptr, "NULL argument");
    const medex::RunConfig &c = config->config;
    Require(!c.gen.template_file.empty(), "[gen] templates is required");
    const auto kb = medex::LoadKnowledgeBase(c.kb.path);
    const auto corpus = medex::GenerateCorpus(kb, c.gen, PipelineFor(c));
    const auto [train, test] = medex::SplitCorpus(corpus, c.train_fraction, c.seed);
    medex::WriteGoldCorpus(corpus, out_dir);
    medex::WriteGoldCorpus(train, out_dir, "train_");
    medex::WriteGoldCorpus(test, out_dir, "test_");
    LogLine(fmt::format("generated {} documents ({} train, {} test) in {}",
                        corpus.documents.size(), train.documents.size(),
                        test.documents.size(), out_dir));
    if (n_docs != nullptr) *n_docs = corpus.documents.size();
  });
}

medex_status medex_model_create(const medex_config *config, const char *corpus_path,
                                const char *labels_path, const char *test_labels_path,
                                medex_model **out) {
  return Guard([&] {
    Require(config != nullptr && corpus_path != nullptr && labels_path != nullptr &&
                out != nullptr,
            "NULL argument");
    const medex::RunConfig &c = config->config;
    const auto kb = medex::LoadKnowledgeBase(c.kb.path);
    const auto counts = medex::CountDocuments(medex::ReadLabels(labels_path));
    medex::EntityCounts test_counts;
    if (test_labels_path != nullptr) {
      test_counts = medex::CountDocuments(medex::ReadLabels(test_labels_path));
    }
    const auto classes = medex::SelectClasses(
        kb, counts, test_labels_path != nullptr ? &test_counts : nullptr, c.kb.top_k,
        c.kb.min_test_count);
    auto h = std::make_unique<medex_model>();
    h->checkpoint =
        medex::InitCheckpoint(c, PipelineFor(c), medex::ReadCorpus(corpus_path), classes);
    LogLine(fmt::format("model: {} classes, vocabulary {}", h->checkpoint.entities.size(),
                        h->checkpoint.tokenizer.size()));
    *out = h.release();
  });
}

medex_status medex_model_pretrain(medex_model *model, const medex_config *config,
                                  const char *corpus_path) {
  return Guard([&] {
    Require(model != nullptr && config != nullptr && corpus_path != nullptr, "NULL argument");
    medex::PretrainCheckpoint(&model->checkpoint, medex::ReadCorpus(corpus_path),
                              config->config.pretrain, Logger());
  });
}

medex_status medex_model_train(medex_model *model, const medex_config *config,
                               const char *corpus_path, const char *labels_path) {
  return Guard([&] {
    Require(model != nullptr && config != nullptr && corpus_path != nullptr &&
                labels_path != nullptr,
            "NULL argument");
    medex::TrainCheckpoint(&model->checkpoint, medex::ReadCorpus(corpus_path),
                           medex::ReadLabels(labels_path), config->config.train, Logger());
  });
}

medex_status medex_model_save(const medex_model *model, const char *path) {
  return Guard([&] {
    Require(model != nullptr && path != nullptr, "NULL argument");
    medex::SaveCheckpoint(model->checkpoint, path);
  });
}

medex_status medex_model_load(const char *path, medex_model **out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "NULL argument");
    auto h = std::make_unique<medex_model>();
    h->checkpoint = medex::LoadCheckpoint(path);
    *out = h.release();
  });
}

size_t medex_model_num_classes(const medex_model *model) {
  return model == nullptr ? 0 : model->checkpoint.entities.size();
}

uint64_t medex_model_steps(const medex_model *model) {
  return model == nullptr ? 0 : model->checkpoint.state.step;
}

medex_status medex_model_predict_file(const medex_model *model, const char *corpus_path,
                                      const char *out_path, double threshold,
                                      size_t workers) {
  return Guard([&] {
    Require(model != nullptr && corpus_path != nullptr && out_path != nullptr,
            "NULL argument");
    Require(threshold > 0.0 && threshold < 1.0, "threshold must be in (0, 1)");
    Require(workers >= 1, "workers must be >= 1");
    const auto preds = medex::PredictDocuments(model->checkpoint, medex::ReadCorpus(corpus_path),
                                               threshold, workers);
    WriteOut(out_path, medex::SerializeLabels(preds));
  });
}

void medex_model_free(medex_model *model) { delete model; }

medex_status medex_eval_recall(const medex_kb *classes, const char *preds_path,
                               const char *labels_path, const char *train_counts_path,
                               const size_t *bins, size_t n_bins, int macro,
                               const char *format, const char *out_path) {
  return Guard([&] {
    Require(classes != nullptr && preds_path != nullptr && labels_path != nullptr &&
                train_counts_path != nullptr && format != nullptr,
            "NULL argument");
    Require(bins != nullptr || n_bins == 0, "NULL bins");
    const auto rows = medex::RecallByBin(
        medex::ReadLabels(preds_path), medex::ReadLabels(labels_path),
        medex::ReadCounts(train_counts_path), std::vector<size_t>(bins, bins + n_bins),
        classes->kb, macro ? medex::Averaging::kMacro : medex::Averaging::kMicro);
    WriteOut(out_path, medex::FormatRecallReport(rows, medex::ParseReportFormat(format)));
  });
}

medex_status medex_eval_discrepancy(const medex_kb *kb, const char *preds_path,
                                    const char *annotator_path, const char *gold_path,
                                    const char *const *entities, size_t n_entities,
                                    const char *train_counts_path, const char *format,
                                    const char *out_path) {
  return Guard([&] {
    Require(preds_path != nullptr && annotator_path != nullptr && gold_path != nullptr &&
                format != nullptr,
            "NULL argument");
    Require(entities != nullptr && n_entities > 0, "no entities given");
    std::vector<std::string> ids;
    for (size_t i = 0; i < n_entities; ++i) {
      Require(entities[i] != nullptr, "NULL entity id");
      ids.emplace_back(entities[i]);
    }
    auto rows = medex::DiscrepancyTable(medex::ReadLabels(preds_path),
                                        medex::ReadLabels(annotator_path),
                                        medex::ReadLabels(gold_path), ids);
    if (kb != nullptr) {
      const medex::EntityCounts counts = train_counts_path != nullptr
                                             ? medex::ReadCounts(train_counts_path)
                                             : medex::EntityCounts{};
      medex::DescribeEntities(&rows, kb->kb, counts);
    }
    WriteOut(out_path, medex::FormatDiscrepancyReport(rows, medex::ParseReportFormat(format)));
  });
}

medex_status medex_eval_counts(const medex_kb *kb, const char *train_labels_path,
                               const char *test_labels_path, const char *format,
                               const char *out_path) {
  return Guard([&] {
    Require(kb != nullptr && train_labels_path != nullptr && format != nullptr,
            "NULL argument");
    const auto rows = medex::CorpusStats(
        medex::ReadLabels(train_labels_path),
        test_labels_path != nullptr ? medex::ReadLabels(test_labels_path)
                                    : std::vector<medex::LabelSet>{},
        kb->kb);
    WriteOut(out_path, medex::FormatStatsReport(rows, medex::ParseReportFormat(format)));
  });
}

medex_status medex_pipeline_run(const medex_config *config, const char *out_dir,
                                medex_run **out) {
  return Guard([&] {
    Require(config != nullptr && out_dir != nullptr && out != nullptr, "NULL argument");
    auto h = std::make_unique<medex_run>();
    h->result = medex::RunPipeline(config->config, out_dir, Logger());
    h->outputs.assign(h->result.outputs.begin(), h->result.outputs.end());
    *out = h.release();
  });
}

size_t medex_run_num_classes(const medex_run *run) {
  return run == nullptr ? 0 : run->result.n_classes;
}

size_t medex_run_recall_count(const medex_run *run) {
  return run == nullptr ? 0 : run->result.recall.size();
}

medex_status medex_run_recall_row(const medex_run *run, size_t i, medex_recall_row *out) {
  return Guard([&] {
    Require(run != nullptr && out != nullptr, "NULL argument");
    Require(i < run->result.recall.size(), "recall row index out of range");
    const medex::RecallRow &r = run->result.recall[i];
    *out = {r.group.c_str(), r.bin_threshold, r.n_entities, r.n_positives, r.n_matched,
            r.recall.has_value() ? 1 : 0, r.recall.value_or(0.0)};
  });
}

size_t medex_run_output_count(const medex_run *run) {
  return run == nullptr ? 0 : run->outputs.size();
}

medex_status medex_run_output(const medex_run *run, size_t i, const char **name,
                              const char **sha256) {
  return Guard([&] {
    Require(run != nullptr && name != nullptr && sha256 != nullptr, "NULL argument");
    Require(i < run->outputs.size(), "output index out of range");
    *name = run->outputs[i].first.c_str();
    *sha256 = run->outputs[i].second.c_str();
  });
}

const char *medex_run_manifest_path(const medex_run *run) {
  return run == nullptr ? nullptr : run->result.manifest_path.c_str();
}

void medex_run_free(medex_run *run) { delete run; }

}  // extern "C"
