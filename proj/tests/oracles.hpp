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

// Reference implementations used only by tests. They share no code path
// with the implementations they check.

#ifndef MEDEX_TESTS_ORACLES_HPP_
#define MEDEX_TESTS_ORACLES_HPP_

#include <fmt/format.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "kb/kb.hpp"
#include "textnorm/textnorm.hpp"

namespace medex::testing {

// Quadratic matcher: every window of every length up to max_len against
// every synonym of every entity, compared token by token.
inline std::set<std::string> BruteForceLabels(
    const TokenList &doc, const KnowledgeBase &kb,
    const NormalizationPipeline &pipeline, size_t max_len) {
  std::vector<std::pair<TokenList, std::string>> synonyms;
  for (const Entity &e : kb.entities()) {
    for (const std::string &s : e.synonyms) {
      synonyms.emplace_back(pipeline.NormalizeTokens(s), e.id);
    }
  }
  std::set<std::string> found;
  for (size_t start = 0; start < doc.size(); ++start) {
    for (size_t len = 1; len <= max_len && start + len <= doc.size(); ++len) {
      for (const auto &[tokens, id] : synonyms) {
        if (tokens.size() != len) continue;
        bool equal = true;
        for (size_t k = 0; k < len && equal; ++k) {
          equal = tokens[k] == doc[start + k];
        }
        if (equal) found.insert(id);
      }
    }
  }
  return found;
}

// Random KB over a small vocabulary so that random documents hit synonyms
// often. Synonyms are 1..8 words; collisions are avoided by construction.
inline KnowledgeBase RandomKb(std::mt19937_64 &rng, size_t n_entities,
                              const std::vector<std::string> &vocab) {
  std::vector<Entity> entities;
  std::set<std::string> used;
  while (entities.size() < n_entities) {
    Entity e;
    e.id = fmt::format("E{:04d}", entities.size());
    e.group = fmt::format("G{}", entities.size() % 4);
    const size_t n_syn = 1 + rng() % 3;
    for (size_t s = 0; s < n_syn; ++s) {
      const size_t len = 1 + rng() % 8;
      std::string syn;
      for (size_t k = 0; k < len; ++k) {
        if (k > 0) syn += ' ';
        syn += vocab[rng() % vocab.size()];
      }
      if (used.insert(syn).second) e.synonyms.push_back(syn);
    }
    if (e.synonyms.empty()) continue;
    e.name = e.synonyms.front();
    entities.push_back(std::move(e));
  }
  return KnowledgeBase::FromEntities(std::move(entities));
}

}  // namespace medex::testing

#endif  // MEDEX_TESTS_ORACLES_HPP_
