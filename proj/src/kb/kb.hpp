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

// Entity knowledge base.
//
// File format: UTF-8, one JSON object per line
//
//   {"id": "C0030193", "name": "pain", "group": "Sign or Symptom",
//    "synonyms": ["pain", "ache"], "unseen_forms": ["aching"]}
//
// Lines starting with '#' and blank lines are ignored. "unseen_forms" is
// optional; those surface forms never enter the lexicon and are only used by
// the corpus generator.

#ifndef MEDEX_KB_KB_HPP_
#define MEDEX_KB_KB_HPP_

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "common/records.hpp"

namespace medex {

struct Entity {
  std::string id;
  std::string name;
  std::string group;
  std::vector<std::string> synonyms;
  std::vector<std::string> unseen_forms;

  bool operator==(const Entity &) const = default;
};

class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  // Validates the entity list: unique non-empty ids, no empty synonyms, and
  // no synonym shared between two entities after lowercasing and
  // tokenization. The canonical name is added to the synonyms if missing.
  static KnowledgeBase FromEntities(std::vector<Entity> entities);

  const std::vector<Entity> &entities() const { return entities_; }
  size_t size() const { return entities_.size(); }
  bool empty() const { return entities_.empty(); }

  // Content digest; identical entity lists have identical versions.
  const std::string &version() const { return version_; }

  const Entity *Find(const std::string &id) const;

  // Sorted distinct group names.
  std::vector<std::string> Groups() const;

 private:
  std::vector<Entity> entities_;
  std::unordered_map<std::string, size_t> index_;
  std::string version_;
};

KnowledgeBase LoadKnowledgeBase(const std::string &path);
KnowledgeBase ParseKnowledgeBase(std::string_view content,
                                 const std::string &source);
std::string SerializeKnowledgeBase(const KnowledgeBase &kb);
void SaveKnowledgeBase(const KnowledgeBase &kb, const std::string &path);

// The k entities with the highest counts; ties go to the lexicographically
// smaller id. Entities missing from the counts have count zero. Output keeps
// the original entity order.
KnowledgeBase SelectTopEntities(const KnowledgeBase &kb,
                                const EntityCounts &train_counts, size_t k);

// Keeps entities whose count is at least min_count.
KnowledgeBase FilterMinFrequency(const KnowledgeBase &kb,
                                 const EntityCounts &test_counts,
                                 size_t min_count);

}  // namespace medex

#endif  // MEDEX_KB_KB_HPP_
