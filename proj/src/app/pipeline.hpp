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


// Stages shared by the CLI subcommands and the end-to-end pipeline.

#ifndef MEDEX_APP_PIPELINE_HPP_
#define MEDEX_APP_PIPELINE_HPP_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "app/run_config.hpp"
#include "common/records.hpp"
#include "eval/eval.hpp"
#include "kb/kb.hpp"
#include "model/checkpoint.hpp"

namespace medex {

using LogFn = std::function<void(const std::string &)>;

// Top-k entities by training document count, then those seen at least
// min_test_count times in the test labels. Without test counts only the
// top-k step applies.
KnowledgeBase SelectClasses(const KnowledgeBase &kb, const EntityCounts &train_counts,
                            const EntityCounts *test_counts, size_t top_k,
                            size_t min_test_count);

// Fresh model with a tokenizer built over the training documents.
Checkpoint InitCheckpoint(const RunConfig &config, const NormalizationPipeline &pipeline,
                          const std::vector<RawDocument> &train_docs,
                          const KnowledgeBase &classes);

std::vector<EncodedSequence> EncodeDocuments(const Checkpoint &checkpoint,
                                             const std::vector<RawDocument> &docs);

// MLM steps, followed by an optimizer reset so fine-tuning starts with
// fresh moments. Returns per-step losses.
std::vector<double> PretrainCheckpoint(Checkpoint *checkpoint,
                                       const std::vector<RawDocument> &docs,
                                       const PretrainConfig &config, const LogFn &log);

// Labels are matched to documents by doc_id; entities outside the class
// list are ignored. Throws kValidation if a document has no label set.
std::vector<double> TrainCheckpoint(Checkpoint *checkpoint,
                                    const std::vector<RawDocument> &docs,
                                    const std::vector<LabelSet> &labels,
                                    const TrainConfig &config, const LogFn &log);

std::vector<LabelSet> PredictDocuments(const Checkpoint &checkpoint,
                                       const std::vector<RawDocument> &docs,
                                       double threshold, size_t workers);

// Stand-in for a human annotator: each gold instance of the listed
// entities is missed with miss_rate, each absent one is added with
// false_positive_rate. Other entities are dropped.
std::vector<LabelSet> SimulateAnnotator(const std::vector<LabelSet> &gold,
                                        const std::vector<std::string> &entities,
                                        double miss_rate, double false_positive_rate,
                                        uint64_t seed);

// The n most frequent training entities among the classes, ties by id.
std::vector<std::string> MostFrequent(const KnowledgeBase &classes,
                                      const EntityCounts &train_counts, size_t n);

struct PipelineResult {
  size_t n_classes = 0;
  std::vector<CorpusStatsRow> stats;
  std::vector<RecallRow> recall;
  std::vector<DiscrepancyRow> discrepancy;
  SetAgreement distant_vs_gold;          // labeler on test documents
  std::map<std::string, std::string> outputs;  // file name -> SHA-256
  std::string manifest_path;
};

// gen -> split -> label -> select classes -> pretrain -> train -> predict
// -> eval, writing every intermediate into out_dir plus manifest.json.
PipelineResult RunPipeline(const RunConfig &config, const std::string &out_dir,
                           const LogFn &log);

}  // namespace medex

#endif  // MEDEX_APP_PIPELINE_HPP_
