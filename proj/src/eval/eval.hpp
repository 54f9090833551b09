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

// Evaluation against distant or gold labels: per-group corpus statistics,
// recall binned by training frequency, and the model/annotator/gold
// discrepancy taxonomy.

#ifndef MEDEX_EVAL_EVAL_HPP_
#define MEDEX_EVAL_EVAL_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "common/records.hpp"
#include "kb/kb.hpp"

namespace medex {

struct GroupStatsRow {
  std::string group;
  size_t n_terms = 0;      // distinct entities with at least one instance
  size_t n_instances = 0;  // entity occurrences summed over label sets

  bool operator==(const GroupStatsRow &) const = default;
};

// One row per KB group, sorted by group name. Throws kValidation on an
// entity id missing from the KB.
std::vector<GroupStatsRow> GroupStats(const std::vector<LabelSet> &labels,
                                      const KnowledgeBase &kb);

struct CorpusStatsRow {
  std::string group;
  size_t total_terms = 0;  // distinct entities seen in either split
  size_t train_instances = 0;
  size_t test_instances = 0;

  bool operator==(const CorpusStatsRow &) const = default;
};

std::vector<CorpusStatsRow> CorpusStats(const std::vector<LabelSet> &train,
                                        const std::vector<LabelSet> &test,
                                        const KnowledgeBase &kb);

enum class Averaging { kMicro, kMacro };

inline constexpr char kAllGroups[] = "all";

struct RecallRow {
  std::string group;
  size_t bin_threshold = 0;  // entities with more than this many train docs
  size_t n_entities = 0;
  size_t n_positives = 0;  // gold instances of in-bin entities
  size_t n_matched = 0;    // of those, predicted
  // Micro: matched / positives. Macro: mean per-entity recall over in-bin
  // entities with positives. Unset when there is nothing to average.
  std::optional<double> recall;

  bool operator==(const RecallRow &) const = default;
};

// Rows for every KB group in name order, then the kAllGroups rows; each
// group lists the thresholds in order. Gold entities outside the KB are
// ignored, so passing the top-K KB evaluates only the model's classes.
// Throws kInvalidArgument unless thresholds are strictly increasing, and
// kValidation on a prediction outside the KB or mismatched doc ids.
std::vector<RecallRow> RecallByBin(const std::vector<LabelSet> &preds,
                                   const std::vector<LabelSet> &gold,
                                   const EntityCounts &train_counts,
                                   const std::vector<size_t> &thresholds,
                                   const KnowledgeBase &kb,
                                   Averaging averaging = Averaging::kMicro);

struct SetAgreement {
  size_t true_positives = 0;
  size_t predicted = 0;
  size_t gold = 0;

  double precision() const;  // 1 when nothing was predicted
  double recall() const;     // 1 when there is no gold
};

// Micro-averaged agreement over aligned documents.
SetAgreement CompareLabels(const std::vector<LabelSet> &preds,
                           const std::vector<LabelSet> &gold);

enum class DiscrepancyCase {
  kBothTp,
  kBothTn,
  kHumanTp,
  kHumanTn,
  kModelTp,
  kModelTn,
  kBothWrong,
};

inline constexpr size_t kNumDiscrepancyCases = 7;

// Column name, e.g. "both_tp".
const char *DiscrepancyCaseName(DiscrepancyCase c);

// human_* cases are the ones the annotator got right and the model did not;
// model_* the reverse. Both wrong covers the two cells where model and
// annotator agree against the gold judgment.
DiscrepancyCase ClassifyDiscrepancy(bool model_says, bool annotator_says, bool gold);

struct DiscrepancyRow {
  std::string entity;
  std::string name;   // filled by DescribeEntities
  std::string group;  // filled by DescribeEntities
  size_t examples = 0;
  std::array<size_t, kNumDiscrepancyCases> counts{};  // by DiscrepancyCase

  bool operator==(const DiscrepancyRow &) const = default;
};

// One row per entity in `entities`, in that order. All three sources must
// cover the same doc ids (kValidation otherwise).
std::vector<DiscrepancyRow> DiscrepancyTable(const std::vector<LabelSet> &preds,
                                             const std::vector<LabelSet> &annotator,
                                             const std::vector<LabelSet> &gold,
                                             const std::vector<std::string> &entities);

// Adds names, groups and training example counts.
void DescribeEntities(std::vector<DiscrepancyRow> *rows, const KnowledgeBase &kb,
                      const EntityCounts &train_counts);

enum class ReportFormat { kCsv, kTsv, kPlotData };

ReportFormat ParseReportFormat(const std::string &name);

// csv/tsv: header plus one line per row; recall as %.4f or "-".
// plot-data: one block per group, "# <group>" then "threshold<TAB>recall"
// lines for defined recalls, blocks separated by a blank line.
std::string FormatRecallReport(const std::vector<RecallRow> &rows, ReportFormat format);
std::string FormatDiscrepancyReport(const std::vector<DiscrepancyRow> &rows,
                                    ReportFormat format);
std::string FormatStatsReport(const std::vector<CorpusStatsRow> &rows, ReportFormat format);

// Throws kInvalidArgument on empty rows, kIo if the path is unwritable.
void EmitReport(const std::vector<RecallRow> &rows, ReportFormat format,
                const std::string &path);
void EmitReport(const std::vector<DiscrepancyRow> &rows, ReportFormat format,
                const std::string &path);
void EmitReport(const std::vector<CorpusStatsRow> &rows, ReportFormat format,
                const std::string &path);

}  // namespace medex

#endif  // MEDEX_EVAL_EVAL_HPP_
