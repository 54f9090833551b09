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

// Record types shared between modules and their JSONL/TSV file forms.
//
//   corpus:  {"doc_id": str, "text": str}            (optional "family")
//   labels:  {"doc_id": str, "entities": [str]}       (ids sorted)
//   counts:  entity_id<TAB>count

#ifndef MEDEX_COMMON_RECORDS_HPP_
#define MEDEX_COMMON_RECORDS_HPP_

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace medex {

struct RawDocument {
  std::string doc_id;
  std::string text;
  // Template family of generated documents; empty for external corpora.
  std::string family;

  bool operator==(const RawDocument &) const = default;
};

// Per-document set of entity ids. Positions are not represented.
struct LabelSet {
  std::string doc_id;
  std::set<std::string> entity_ids;

  bool operator==(const LabelSet &) const = default;
};

using EntityCounts = std::map<std::string, size_t>;

std::vector<RawDocument> ReadCorpus(const std::string &path);
std::string SerializeCorpus(const std::vector<RawDocument> &docs);
void WriteCorpus(const std::string &path, const std::vector<RawDocument> &docs);

std::vector<LabelSet> ReadLabels(const std::string &path);
std::string SerializeLabels(const std::vector<LabelSet> &labels);
void WriteLabels(const std::string &path, const std::vector<LabelSet> &labels);

// Number of documents each entity appears in.
EntityCounts CountDocuments(const std::vector<LabelSet> &labels);

EntityCounts ReadCounts(const std::string &path);
std::string SerializeCounts(const EntityCounts &counts);
void WriteCounts(const std::string &path, const EntityCounts &counts);

}  // namespace medex

#endif  // MEDEX_COMMON_RECORDS_HPP_
