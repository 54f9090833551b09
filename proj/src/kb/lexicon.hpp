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

#ifndef MEDEX_KB_LEXICON_HPP_
#define MEDEX_KB_LEXICON_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kb/kb.hpp"
#include "textnorm/textnorm.hpp"

namespace medex {

constexpr size_t kDefaultMaxTermLen = 7;
constexpr size_t kMaxSupportedTermLen = 64;

// Exact-match table from normalized synonym token sequences to entity ids.
//
// The lexicon carries the normalization pipeline it was built with so that
// documents can be normalized identically at labeling time.
class NormalizedLexicon {
 public:
  struct Entry {
    std::string key;  // tokens joined by single spaces
    std::string entity_id;
    bool operator==(const Entry &) const = default;
  };

  NormalizedLexicon() = default;

  // Normalizes every synonym with the pipeline. Synonyms longer than
  // max_term_len tokens (or with no tokens at all) are skipped and reported
  // in *warnings. Throws if two entities normalize to the same key.
  static NormalizedLexicon Build(const KnowledgeBase &kb,
                                 const NormalizationPipeline &pipeline,
                                 size_t max_term_len,
                                 std::vector<std::string> *warnings);

  // Entity id for an exact token sequence, or nullptr.
  const std::string *Find(std::span<const std::string> tokens) const;

  // Bit (len - 1) is set if some key of that length starts with token.
  uint64_t LengthMask(const std::string &first_token) const;

  size_t max_term_len() const { return max_term_len_; }
  size_t size() const { return entries_.size(); }
  const NormalizationPipeline &pipeline() const { return pipeline_; }
  const std::string &kb_version() const { return kb_version_; }

  // Sorted by key.
  const std::vector<Entry> &entries() const { return entries_; }
  // entity id -> group, for every entity of the source knowledge base.
  const std::map<std::string, std::string> &groups() const { return groups_; }

  // Identifies lexicon content and the pipeline it was built with.
  std::string Version() const;

  std::string Serialize() const;
  static NormalizedLexicon Parse(const std::string &content,
                                 const std::string &source);
  void Save(const std::string &path) const;
  static NormalizedLexicon Load(const std::string &path);

  bool operator==(const NormalizedLexicon &other) const {
    return max_term_len_ == other.max_term_len_ &&
           entries_ == other.entries_ && groups_ == other.groups_ &&
           pipeline_ == other.pipeline_ && kb_version_ == other.kb_version_;
  }

 private:
  void Index();

  size_t max_term_len_ = kDefaultMaxTermLen;
  NormalizationPipeline pipeline_;
  std::string kb_version_;
  std::vector<Entry> entries_;
  std::map<std::string, std::string> groups_;

  std::unordered_map<std::string, size_t> by_key_;
  std::unordered_map<std::string, uint64_t> first_token_mask_;
};

inline NormalizedLexicon BuildLexicon(const KnowledgeBase &kb,
                                      const NormalizationPipeline &pipeline,
                                      size_t max_term_len,
                                      std::vector<std::string> *warnings) {
  return NormalizedLexicon::Build(kb, pipeline, max_term_len, warnings);
}

}  // namespace medex

#endif  // MEDEX_KB_LEXICON_HPP_
