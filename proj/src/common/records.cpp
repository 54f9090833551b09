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

#include "common/records.hpp"

#include <charconv>

#include <fmt/format.h>
#include <json.hpp>

#include "common/error.hpp"
#include "common/io.hpp"

namespace medex {

using nlohmann::json;

namespace {

json ParseLine(const std::string &path, std::string_view line, size_t lineno) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}:{}: expected a JSON object", path, lineno));
    }
    return j;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParse,
                fmt::format("{}:{}: {}", path, lineno, e.what()));
  }
}

std::string GetString(const json &j, const char *key, const std::string &path,
                      size_t lineno) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::kParse,
                fmt::format("{}:{}: missing string field \"{}\"", path, lineno,
                            key));
  }
  return it->get<std::string>();
}

bool Skippable(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

}  // namespace

std::vector<RawDocument> ReadCorpus(const std::string &path) {
  std::vector<RawDocument> docs;
  ForEachLine(path, [&](std::string_view line, size_t lineno) {
    if (Skippable(line)) return;
    json j = ParseLine(path, line, lineno);
    RawDocument doc;
    doc.doc_id = GetString(j, "doc_id", path, lineno);
    doc.text = GetString(j, "text", path, lineno);
    if (auto it = j.find("family"); it != j.end() && it->is_string()) {
      doc.family = it->get<std::string>();
    }
    docs.push_back(std::move(doc));
  });
  return docs;
}

std::string SerializeCorpus(const std::vector<RawDocument> &docs) {
  std::string out;
  for (const RawDocument &doc : docs) {
    json j = {{"doc_id", doc.doc_id}, {"text", doc.text}};
    if (!doc.family.empty()) j["family"] = doc.family;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void WriteCorpus(const std::string &path, const std::vector<RawDocument> &docs) {
  WriteFile(path, SerializeCorpus(docs));
}

std::vector<LabelSet> ReadLabels(const std::string &path) {
  std::vector<LabelSet> labels;
  ForEachLine(path, [&](std::string_view line, size_t lineno) {
    if (Skippable(line)) return;
    json j = ParseLine(path, line, lineno);
    LabelSet set;
    set.doc_id = GetString(j, "doc_id", path, lineno);
    auto it = j.find("entities");
    if (it == j.end() || !it->is_array()) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}:{}: missing array field \"entities\"", path,
                              lineno));
    }
    for (const json &e : *it) {
      if (!e.is_string()) {
        throw Error(ErrorCode::kParse,
                    fmt::format("{}:{}: entity ids must be strings", path,
                                lineno));
      }
      set.entity_ids.insert(e.get<std::string>());
    }
    labels.push_back(std::move(set));
  });
  return labels;
}

std::string SerializeLabels(const std::vector<LabelSet> &labels) {
  std::string out;
  for (const LabelSet &set : labels) {
    json ids = json::array();
    for (const std::string &id : set.entity_ids) ids.push_back(id);
    json j = {{"doc_id", set.doc_id}, {"entities", std::move(ids)}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

void WriteLabels(const std::string &path, const std::vector<LabelSet> &labels) {
  WriteFile(path, SerializeLabels(labels));
}

EntityCounts CountDocuments(const std::vector<LabelSet> &labels) {
  EntityCounts counts;
  for (const LabelSet &set : labels) {
    for (const std::string &id : set.entity_ids) ++counts[id];
  }
  return counts;
}

EntityCounts ReadCounts(const std::string &path) {
  EntityCounts counts;
  size_t row = 0;
  for (const auto &[id, value] : ReadTsvPairs(path)) {
    ++row;
    size_t n = 0;
    auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}: row {}: bad count \"{}\"", path, row, value));
    }
    if (!counts.emplace(id, n).second) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}: duplicate entity id {}", path, id));
    }
  }
  return counts;
}

std::string SerializeCounts(const EntityCounts &counts) {
  std::string out;
  for (const auto &[id, n] : counts) out += fmt::format("{}\t{}\n", id, n);
  return out;
}

void WriteCounts(const std::string &path, const EntityCounts &counts) {
  WriteFile(path, SerializeCounts(counts));
}

}  // namespace medex
