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

#include "kb/kb.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "common/error.hpp"
#include "common/io.hpp"
#include "common/utf8.hpp"
#include "textnorm/textnorm.hpp"

namespace medex {

using nlohmann::json;

KnowledgeBase KnowledgeBase::FromEntities(std::vector<Entity> entities) {
  KnowledgeBase kb;
  // Base-normalized synonym -> owning entity.
  std::map<std::string, std::string> owner;
  for (size_t i = 0; i < entities.size(); ++i) {
    Entity &e = entities[i];
    if (e.id.empty()) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("entity #{} has an empty id", i + 1));
    }
    if (!kb.index_.emplace(e.id, i).second) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("duplicate entity id {}", e.id));
    }
    if (e.name.empty()) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("entity {} has an empty name", e.id));
    }
    if (std::find(e.synonyms.begin(), e.synonyms.end(), e.name) ==
        e.synonyms.end()) {
      e.synonyms.insert(e.synonyms.begin(), e.name);
    }
    for (const std::string &s : e.synonyms) {
      if (s.empty()) {
        throw Error(ErrorCode::kValidation,
                    fmt::format("entity {} has an empty synonym", e.id));
      }
      std::string key = JoinTokens(Tokenize(utf8::ToLower(s)));
      if (key.empty()) continue;
      auto [it, inserted] = owner.emplace(key, e.id);
      if (!inserted && it->second != e.id) {
        throw Error(ErrorCode::kValidation,
                    fmt::format("synonym \"{}\" shared by entities {} and {}",
                                key, it->second, e.id));
      }
    }
  }
  kb.entities_ = std::move(entities);
  kb.version_ = Sha256Hex(SerializeKnowledgeBase(kb)).substr(0, 16);
  return kb;
}

const Entity *KnowledgeBase::Find(const std::string &id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &entities_[it->second];
}

std::vector<std::string> KnowledgeBase::Groups() const {
  std::set<std::string> groups;
  for (const Entity &e : entities_) groups.insert(e.group);
  return {groups.begin(), groups.end()};
}

namespace {

std::vector<std::string> StringArray(const json &j, const char *key,
                                     bool required, const std::string &where) {
  std::vector<std::string> out;
  auto it = j.find(key);
  if (it == j.end()) {
    if (required) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}: missing field \"{}\"", where, key));
    }
    return out;
  }
  if (!it->is_array()) {
    throw Error(ErrorCode::kParse,
                fmt::format("{}: \"{}\" must be an array", where, key));
  }
  for (const json &s : *it) {
    if (!s.is_string()) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}: \"{}\" must contain strings", where, key));
    }
    out.push_back(s.get<std::string>());
  }
  return out;
}

std::string StringField(const json &j, const char *key,
                        const std::string &where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::kParse,
                fmt::format("{}: missing string field \"{}\"", where, key));
  }
  return it->get<std::string>();
}

}  // namespace

KnowledgeBase ParseKnowledgeBase(std::string_view content,
                                 const std::string &source) {
  std::vector<Entity> entities;
  size_t lineno = 0;
  size_t pos = 0;
  while (pos <= content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (line.front() == '#') continue;
    const std::string where = fmt::format("{}:{}", source, lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception &e) {
      throw Error(ErrorCode::kParse, fmt::format("{}: {}", where, e.what()));
    }
    if (!j.is_object()) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}: expected a JSON object", where));
    }
    Entity e;
    e.id = StringField(j, "id", where);
    e.name = StringField(j, "name", where);
    e.group = StringField(j, "group", where);
    e.synonyms = StringArray(j, "synonyms", true, where);
    e.unseen_forms = StringArray(j, "unseen_forms", false, where);
    if (e.synonyms.empty()) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("{}: entity {} has no synonyms", where, e.id));
    }
    for (const std::string &s : e.synonyms) {
      if (s.empty()) {
        throw Error(ErrorCode::kValidation,
                    fmt::format("{}: entity {} has an empty synonym", where,
                                e.id));
      }
    }
    entities.push_back(std::move(e));
  }
  try {
    return KnowledgeBase::FromEntities(std::move(entities));
  } catch (const Error &e) {
    throw Error(e.code(), fmt::format("{}: {}", source, e.what()));
  }
}

KnowledgeBase LoadKnowledgeBase(const std::string &path) {
  return ParseKnowledgeBase(ReadFile(path), path);
}

std::string SerializeKnowledgeBase(const KnowledgeBase &kb) {
  std::string out;
  for (const Entity &e : kb.entities()) {
    json j = {{"id", e.id},
              {"name", e.name},
              {"group", e.group},
              {"synonyms", e.synonyms}};
    if (!e.unseen_forms.empty()) j["unseen_forms"] = e.unseen_forms;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void SaveKnowledgeBase(const KnowledgeBase &kb, const std::string &path) {
  WriteFile(path, SerializeKnowledgeBase(kb));
}

namespace {

size_t CountOf(const EntityCounts &counts, const std::string &id) {
  auto it = counts.find(id);
  return it == counts.end() ? 0 : it->second;
}

KnowledgeBase Subset(const KnowledgeBase &kb, const std::set<std::string> &keep) {
  std::vector<Entity> out;
  for (const Entity &e : kb.entities()) {
    if (keep.count(e.id) > 0) out.push_back(e);
  }
  return KnowledgeBase::FromEntities(std::move(out));
}

}  // namespace

KnowledgeBase SelectTopEntities(const KnowledgeBase &kb,
                                const EntityCounts &train_counts, size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  std::vector<const Entity *> ranked;
  for (const Entity &e : kb.entities()) ranked.push_back(&e);
  std::sort(ranked.begin(), ranked.end(),
            [&](const Entity *a, const Entity *b) {
              const size_t ca = CountOf(train_counts, a->id);
              const size_t cb = CountOf(train_counts, b->id);
              if (ca != cb) return ca > cb;
              return a->id < b->id;
            });
  std::set<std::string> keep;
  for (size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    keep.insert(ranked[i]->id);
  }
  return Subset(kb, keep);
}

KnowledgeBase FilterMinFrequency(const KnowledgeBase &kb,
                                 const EntityCounts &test_counts,
                                 size_t min_count) {
  std::set<std::string> keep;
  for (const Entity &e : kb.entities()) {
    if (CountOf(test_counts, e.id) >= min_count) keep.insert(e.id);
  }
  return Subset(kb, keep);
}

}  // namespace medex
