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


#include "eval/eval.hpp"

#include <map>
#include <set>

#include <fmt/format.h>

#include "common/error.hpp"
#include "common/io.hpp"

namespace medex {
namespace {

using DocIndex = std::map<std::string, const std::set<std::string> *>;

DocIndex IndexDocs(const std::vector<LabelSet> &labels, const char *what) {
  DocIndex index;
  for (const LabelSet &l : labels) {
    if (!index.emplace(l.doc_id, &l.entity_ids).second) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("{}: duplicate doc_id \"{}\"", what, l.doc_id));
    }
  }
  return index;
}

void RequireSameDocs(const DocIndex &a, const char *a_name, const DocIndex &b,
                     const char *b_name) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("doc \"{}\" is in {} but not in {}", ia->first, a_name, b_name));
    }
    if (ia == a.end() || ib->first < ia->first) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("doc \"{}\" is in {} but not in {}", ib->first, b_name, a_name));
    }
    ++ia;
    ++ib;
  }
}

const Entity &Lookup(const KnowledgeBase &kb, const std::string &id, const char *what) {
  const Entity *e = kb.Find(id);
  if (e == nullptr) {
    throw Error(ErrorCode::kValidation,
                fmt::format("{} references unknown entity \"{}\"", what, id));
  }
  return *e;
}

size_t CountOf(const EntityCounts &counts, const std::string &id) {
  auto it = counts.find(id);
  return it == counts.end() ? 0 : it->second;
}

std::string FormatRecall(const std::optional<double> &r) {
  return r.has_value() ? fmt::format("{:.4f}", *r) : "-";
}

char Separator(ReportFormat format) {
  switch (format) {
    case ReportFormat::kCsv:
      return ',';
    case ReportFormat::kTsv:
      return '\t';
    case ReportFormat::kPlotData:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument, "plot-data applies to recall reports only");
}

// Quotes a CSV field when needed. TSV fields cannot carry tabs or newlines.
std::string Field(const std::string &s, char sep) {
  if (sep == '\t') {
    if (s.find_first_of("\t\n") != std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("field \"{}\" not TSV-safe", s));
    }
    return s;
  }
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string Join(const std::vector<std::string> &fields, char sep) {
  std::string line;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += sep;
    line += Field(fields[i], sep);
  }
  return line + "\n";
}

template <class Row>
void Emit(const std::vector<Row> &rows, const std::string &text, const std::string &path) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "no report rows to write");
  WriteFile(path, text);
}

}  // namespace

std::vector<GroupStatsRow> GroupStats(const std::vector<LabelSet> &labels,
                                      const KnowledgeBase &kb) {
  std::map<std::string, std::set<std::string>> terms;
  std::map<std::string, size_t> instances;
  for (const LabelSet &l : labels) {
    for (const std::string &id : l.entity_ids) {
      const Entity &e = Lookup(kb, id, "label set");
      terms[e.group].insert(id);
      ++instances[e.group];
    }
  }
  std::vector<GroupStatsRow> rows;
  for (const std::string &group : kb.Groups()) {
    rows.push_back({group, terms[group].size(), instances[group]});
  }
  return rows;
}

std::vector<CorpusStatsRow> CorpusStats(const std::vector<LabelSet> &train,
                                        const std::vector<LabelSet> &test,
                                        const KnowledgeBase &kb) {
  std::vector<LabelSet> both = train;
  both.insert(both.end(), test.begin(), test.end());
  const std::vector<GroupStatsRow> all = GroupStats(both, kb);
  const std::vector<GroupStatsRow> tr = GroupStats(train, kb);
  const std::vector<GroupStatsRow> te = GroupStats(test, kb);
  std::vector<CorpusStatsRow> rows;
  for (size_t i = 0; i < all.size(); ++i) {
    rows.push_back({all[i].group, all[i].n_terms, tr[i].n_instances, te[i].n_instances});
  }
  return rows;
}

std::vector<RecallRow> RecallByBin(const std::vector<LabelSet> &preds,
                                   const std::vector<LabelSet> &gold,
                                   const EntityCounts &train_counts,
                                   const std::vector<size_t> &thresholds,
                                   const KnowledgeBase &kb, Averaging averaging) {
  if (thresholds.empty()) throw Error(ErrorCode::kInvalidArgument, "no recall bins given");
  for (size_t i = 1; i < thresholds.size(); ++i) {
    if (thresholds[i] <= thresholds[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("bin thresholds must be strictly increasing: {} after {}",
                              thresholds[i], thresholds[i - 1]));
    }
  }
  const DocIndex p = IndexDocs(preds, "predictions");
  const DocIndex g = IndexDocs(gold, "gold labels");
  for (const auto &[doc, ids] : p) {
    for (const std::string &id : *ids) Lookup(kb, id, "prediction");
  }
  RequireSameDocs(p, "predictions", g, "gold labels");

  // Per-entity positives and hits; everything else is aggregation.
  std::map<std::string, std::pair<size_t, size_t>> per_entity;
  for (const auto &[doc, gold_ids] : g) {
    const std::set<std::string> &pred_ids = *p.at(doc);
    for (const std::string &id : *gold_ids) {
      if (kb.Find(id) == nullptr) continue;
      auto &[positives, matched] = per_entity[id];
      ++positives;
      if (pred_ids.count(id) != 0) ++matched;
    }
  }

  auto make_row = [&](const std::string &group, size_t t) {
    RecallRow row;
    row.group = group;
    row.bin_threshold = t;
    double macro_sum = 0;
    size_t macro_n = 0;
    for (const Entity &e : kb.entities()) {
      if (group != kAllGroups && e.group != group) continue;
      if (CountOf(train_counts, e.id) <= t) continue;
      ++row.n_entities;
      auto it = per_entity.find(e.id);
      if (it == per_entity.end()) continue;
      row.n_positives += it->second.first;
      row.n_matched += it->second.second;
      macro_sum += static_cast<double>(it->second.second) / it->second.first;
      ++macro_n;
    }
    if (averaging == Averaging::kMicro && row.n_positives > 0) {
      row.recall = static_cast<double>(row.n_matched) / row.n_positives;
    } else if (averaging == Averaging::kMacro && macro_n > 0) {
      row.recall = macro_sum / macro_n;
    }
    return row;
  };

  std::vector<RecallRow> rows;
  std::vector<std::string> groups = kb.Groups();
  groups.push_back(kAllGroups);
  for (const std::string &group : groups) {
    for (size_t t : thresholds) rows.push_back(make_row(group, t));
  }
  return rows;
}

double SetAgreement::precision() const {
  return predicted == 0 ? 1.0 : static_cast<double>(true_positives) / predicted;
}

double SetAgreement::recall() const {
  return gold == 0 ? 1.0 : static_cast<double>(true_positives) / gold;
}

SetAgreement CompareLabels(const std::vector<LabelSet> &preds,
                           const std::vector<LabelSet> &gold) {
  const DocIndex p = IndexDocs(preds, "predictions");
  const DocIndex g = IndexDocs(gold, "gold labels");
  RequireSameDocs(p, "predictions", g, "gold labels");
  SetAgreement a;
  for (const auto &[doc, gold_ids] : g) {
    const std::set<std::string> &pred_ids = *p.at(doc);
    a.predicted += pred_ids.size();
    a.gold += gold_ids->size();
    for (const std::string &id : pred_ids) a.true_positives += gold_ids->count(id);
  }
  return a;
}

const char *DiscrepancyCaseName(DiscrepancyCase c) {
  switch (c) {
    case DiscrepancyCase::kBothTp:
      return "both_tp";
    case DiscrepancyCase::kBothTn:
      return "both_tn";
    case DiscrepancyCase::kHumanTp:
      return "human_tp";
    case DiscrepancyCase::kHumanTn:
      return "human_tn";
    case DiscrepancyCase::kModelTp:
      return "model_tp";
    case DiscrepancyCase::kModelTn:
      return "model_tn";
    case DiscrepancyCase::kBothWrong:
      return "both_wrong";
  }
  return "unknown";
}

DiscrepancyCase ClassifyDiscrepancy(bool model_says, bool annotator_says, bool gold) {
  const bool model_right = model_says == gold;
  const bool human_right = annotator_says == gold;
  if (model_right && human_right) {
    return gold ? DiscrepancyCase::kBothTp : DiscrepancyCase::kBothTn;
  }
  if (model_right) return gold ? DiscrepancyCase::kModelTp : DiscrepancyCase::kModelTn;
  if (human_right) return gold ? DiscrepancyCase::kHumanTp : DiscrepancyCase::kHumanTn;
  return DiscrepancyCase::kBothWrong;
}

std::vector<DiscrepancyRow> DiscrepancyTable(const std::vector<LabelSet> &preds,
                                             const std::vector<LabelSet> &annotator,
                                             const std::vector<LabelSet> &gold,
                                             const std::vector<std::string> &entities) {
  const DocIndex p = IndexDocs(preds, "predictions");
  const DocIndex a = IndexDocs(annotator, "annotator labels");
  const DocIndex g = IndexDocs(gold, "gold labels");
  RequireSameDocs(p, "predictions", g, "gold labels");
  RequireSameDocs(a, "annotator labels", g, "gold labels");
  std::vector<DiscrepancyRow> rows;
  for (const std::string &id : entities) {
    DiscrepancyRow row;
    row.entity = id;
    for (const auto &[doc, gold_ids] : g) {
      const DiscrepancyCase c = ClassifyDiscrepancy(
          p.at(doc)->count(id) != 0, a.at(doc)->count(id) != 0, gold_ids->count(id) != 0);
      ++row.counts[static_cast<size_t>(c)];
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void DescribeEntities(std::vector<DiscrepancyRow> *rows, const KnowledgeBase &kb,
                      const EntityCounts &train_counts) {
  for (DiscrepancyRow &row : *rows) {
    const Entity &e = Lookup(kb, row.entity, "discrepancy table");
    row.name = e.name;
    row.group = e.group;
    row.examples = CountOf(train_counts, row.entity);
  }
}

ReportFormat ParseReportFormat(const std::string &name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "tsv") return ReportFormat::kTsv;
  if (name == "plot-data") return ReportFormat::kPlotData;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown report format \"{}\" (csv, tsv, plot-data)", name));
}

std::string FormatRecallReport(const std::vector<RecallRow> &rows, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::kPlotData) {
    std::vector<std::string> order;
    std::map<std::string, std::string> blocks;
    for (const RecallRow &row : rows) {
      if (blocks.count(row.group) == 0) order.push_back(row.group);
      std::string &block = blocks[row.group];
      if (row.recall.has_value()) {
        block += fmt::format("{}\t{:.4f}\n", row.bin_threshold, *row.recall);
      }
    }
    for (size_t i = 0; i < order.size(); ++i) {
      if (i > 0) out += "\n";
      out += "# " + order[i] + "\n" + blocks[order[i]];
    }
    return out;
  }
  const char sep = Separator(format);
  out = Join({"group", "bin", "n_entities", "positives", "matched", "recall"}, sep);
  for (const RecallRow &r : rows) {
    out += Join({r.group, std::to_string(r.bin_threshold), std::to_string(r.n_entities),
                 std::to_string(r.n_positives), std::to_string(r.n_matched),
                 FormatRecall(r.recall)},
                sep);
  }
  return out;
}

std::string FormatDiscrepancyReport(const std::vector<DiscrepancyRow> &rows,
                                    ReportFormat format) {
  const char sep = Separator(format);
  std::vector<std::string> header = {"entity", "name", "group", "examples"};
  for (size_t c = 0; c < kNumDiscrepancyCases; ++c) {
    header.push_back(DiscrepancyCaseName(static_cast<DiscrepancyCase>(c)));
  }
  std::string out = Join(header, sep);
  for (const DiscrepancyRow &r : rows) {
    std::vector<std::string> fields = {r.entity, r.name, r.group, std::to_string(r.examples)};
    for (size_t n : r.counts) fields.push_back(std::to_string(n));
    out += Join(fields, sep);
  }
  return out;
}

std::string FormatStatsReport(const std::vector<CorpusStatsRow> &rows, ReportFormat format) {
  const char sep = Separator(format);
  std::string out = Join({"group", "total_terms", "train_instances", "test_instances"}, sep);
  for (const CorpusStatsRow &r : rows) {
    out += Join({r.group, std::to_string(r.total_terms), std::to_string(r.train_instances),
                 std::to_string(r.test_instances)},
                sep);
  }
  return out;
}

void EmitReport(const std::vector<RecallRow> &rows, ReportFormat format,
                const std::string &path) {
  Emit(rows, FormatRecallReport(rows, format), path);
}

void EmitReport(const std::vector<DiscrepancyRow> &rows, ReportFormat format,
                const std::string &path) {
  Emit(rows, FormatDiscrepancyReport(rows, format), path);
}

void EmitReport(const std::vector<CorpusStatsRow> &rows, ReportFormat format,
                const std::string &path) {
  Emit(rows, FormatStatsReport(rows, format), path);
}

}  // namespace medex
