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

// Text normalization shared by documents and lexicon entries:
//
//   lowercase -> tokenize -> expand abbreviations -> lemmatize
//
// The same pipeline must be applied to both sides, since the labeler relies
// on exact token-sequence equality.

#ifndef MEDEX_TEXTNORM_TEXTNORM_HPP_
#define MEDEX_TEXTNORM_TEXTNORM_HPP_

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace medex {

using TokenList = std::vector<std::string>;

struct NormalizedDocument {
  std::string doc_id;
  TokenList tokens;

  bool operator==(const NormalizedDocument &) const = default;
};

std::string JoinTokens(const TokenList &tokens);

// Splits lowercased text on Unicode whitespace and strips leading and
// trailing punctuation from each piece. Pieces that are all punctuation are
// dropped; punctuation inside a piece ("t-37.2") is kept.
TokenList Tokenize(std::string_view text);

// Immutable abbreviation and lemma tables.
//
// Construction validates that normalization is idempotent:
//  - no token of any expansion occurs in any abbreviation key,
//  - lemma values are fixed points of the lemma table,
//  - no lemma value produced by a non-identity entry occurs in a key.
// Under these conditions a second pass over normalized output finds nothing
// to expand or lemmatize.
class NormalizationPipeline {
 public:
  // Identity pipeline (lowercase and tokenize only).
  NormalizationPipeline() = default;

  // Entries are raw strings; they are lowercased and tokenized here.
  static NormalizationPipeline Create(
      const std::vector<std::pair<std::string, std::string>> &abbreviations,
      const std::vector<std::pair<std::string, std::string>> &lemmas);

  // Either path may be empty for an empty table.
  static NormalizationPipeline Load(const std::string &abbreviation_path,
                                    const std::string &lemma_path);

  // Leftmost-longest, non-overlapping, single pass.
  TokenList ExpandAbbreviations(const TokenList &tokens) const;

  const std::string &Lemmatize(const std::string &token) const;

  TokenList NormalizeTokens(std::string_view text) const;
  NormalizedDocument Normalize(std::string doc_id, std::string_view text) const;

  const std::map<TokenList, TokenList> &abbreviations() const {
    return abbreviations_;
  }
  const std::map<std::string, std::string> &lemmas() const { return lemmas_; }

  // Content digest of both tables.
  std::string Version() const;

  bool operator==(const NormalizationPipeline &other) const {
    return abbreviations_ == other.abbreviations_ && lemmas_ == other.lemmas_;
  }

 private:
  void Index();

  std::map<TokenList, TokenList> abbreviations_;
  std::map<std::string, std::string> lemmas_;

  // Lookup structures derived from the tables above.
  std::unordered_map<std::string, TokenList> expansion_by_key_;
  std::unordered_map<std::string, std::string> lemma_index_;
  size_t max_key_len_ = 0;
};

// Free-function form: lowercase, tokenize, expand, lemmatize.
NormalizedDocument Normalize(std::string_view text,
                             const NormalizationPipeline &pipeline);

TokenList ExpandAbbreviations(const TokenList &tokens,
                              const NormalizationPipeline &pipeline);

}  // namespace medex

#endif  // MEDEX_TEXTNORM_TEXTNORM_HPP_
