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

#include "textnorm/textnorm.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "common/error.hpp"
#include "common/io.hpp"
#include "common/utf8.hpp"

namespace medex {

std::string JoinTokens(const TokenList &tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

TokenList Tokenize(std::string_view text) {
  TokenList tokens;
  const std::u32string cps = utf8::Decode(text);
  size_t i = 0;
  const size_t n = cps.size();
  while (i < n) {
    while (i < n && utf8::IsSpace(cps[i])) ++i;
    size_t begin = i;
    while (i < n && !utf8::IsSpace(cps[i])) ++i;
    size_t end = i;
    while (begin < end && utf8::IsPunct(cps[begin])) ++begin;
    while (end > begin && utf8::IsPunct(cps[end - 1])) --end;
    if (begin < end) {
      tokens.push_back(
          utf8::Encode(std::u32string_view(cps).substr(begin, end - begin)));
    }
  }
  return tokens;
}

namespace {

TokenList LowerTokens(std::string_view raw) {
  return Tokenize(utf8::ToLower(raw));
}

std::string SingleToken(const std::string &raw, const char *what) {
  TokenList t = LowerTokens(raw);
  if (t.size() != 1) {
    throw Error(ErrorCode::kValidation,
                fmt::format("lemma table {} \"{}\" must be a single token", what,
                            raw));
  }
  return t.front();
}

}  // namespace

NormalizationPipeline NormalizationPipeline::Create(
    const std::vector<std::pair<std::string, std::string>> &abbreviations,
    const std::vector<std::pair<std::string, std::string>> &lemmas) {
  NormalizationPipeline p;
  for (const auto &[raw_key, raw_value] : abbreviations) {
    TokenList key = LowerTokens(raw_key);
    TokenList value = LowerTokens(raw_value);
    if (key.empty()) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("abbreviation \"{}\" has no tokens", raw_key));
    }
    if (value.empty()) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("abbreviation \"{}\" has an empty expansion",
                              raw_key));
    }
    auto [it, inserted] = p.abbreviations_.emplace(key, value);
    if (!inserted && it->second != value) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("abbreviation \"{}\" defined twice", raw_key));
    }
  }
  for (const auto &[raw_surface, raw_lemma] : lemmas) {
    std::string surface = SingleToken(raw_surface, "surface");
    std::string lemma = SingleToken(raw_lemma, "lemma");
    auto [it, inserted] = p.lemmas_.emplace(surface, lemma);
    if (!inserted && it->second != lemma) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("lemma for \"{}\" defined twice", surface));
    }
  }

  std::set<std::string> key_tokens;
  for (const auto &[key, value] : p.abbreviations_) {
    key_tokens.insert(key.begin(), key.end());
  }
  for (const auto &[key, value] : p.abbreviations_) {
    for (const std::string &t : value) {
      if (key_tokens.count(t) > 0) {
        throw Error(ErrorCode::kValidation,
                    fmt::format("expansion of \"{}\" contains abbreviation "
                                "token \"{}\"",
                                JoinTokens(key), t));
      }
    }
  }
  for (const auto &[surface, lemma] : p.lemmas_) {
    auto it = p.lemmas_.find(lemma);
    if (it != p.lemmas_.end() && it->second != lemma) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("lemma chain {} -> {} -> {}", surface, lemma,
                              it->second));
    }
    if (surface != lemma && key_tokens.count(lemma) > 0) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("lemma \"{}\" of \"{}\" is an abbreviation token",
                              lemma, surface));
    }
  }
  p.Index();
  return p;
}

NormalizationPipeline NormalizationPipeline::Load(
    const std::string &abbreviation_path, const std::string &lemma_path) {
  std::vector<std::pair<std::string, std::string>> abbreviations;
  std::vector<std::pair<std::string, std::string>> lemmas;
  if (!abbreviation_path.empty()) abbreviations = ReadTsvPairs(abbreviation_path);
  if (!lemma_path.empty()) lemmas = ReadTsvPairs(lemma_path);
  return Create(abbreviations, lemmas);
}

void NormalizationPipeline::Index() {
  expansion_by_key_.clear();
  max_key_len_ = 0;
  for (const auto &[key, value] : abbreviations_) {
    expansion_by_key_.emplace(JoinTokens(key), value);
    max_key_len_ = std::max(max_key_len_, key.size());
  }
  lemma_index_.clear();
  for (const auto &[surface, lemma] : lemmas_) {
    if (surface != lemma) lemma_index_.emplace(surface, lemma);
  }
}

TokenList NormalizationPipeline::ExpandAbbreviations(
    const TokenList &tokens) const {
  if (expansion_by_key_.empty()) return tokens;
  TokenList out;
  out.reserve(tokens.size());
  size_t i = 0;
  std::string key;
  while (i < tokens.size()) {
    const size_t longest = std::min(max_key_len_, tokens.size() - i);
    size_t matched = 0;
    const TokenList *expansion = nullptr;
    for (size_t len = longest; len >= 1; --len) {
      key = tokens[i];
      for (size_t k = 1; k < len; ++k) {
        key += ' ';
        key += tokens[i + k];
      }
      auto it = expansion_by_key_.find(key);
      if (it != expansion_by_key_.end()) {
        matched = len;
        expansion = &it->second;
        break;
      }
    }
    if (matched == 0) {
      out.push_back(tokens[i]);
      ++i;
    } else {
      out.insert(out.end(), expansion->begin(), expansion->end());
      i += matched;
    }
  }
  return out;
}

const std::string &NormalizationPipeline::Lemmatize(
    const std::string &token) const {
  auto it = lemma_index_.find(token);
  return it == lemma_index_.end() ? token : it->second;
}

TokenList NormalizationPipeline::NormalizeTokens(std::string_view text) const {
  TokenList tokens = ExpandAbbreviations(Tokenize(utf8::ToLower(text)));
  for (std::string &t : tokens) {
    const std::string &lemma = Lemmatize(t);
    if (&lemma != &t) t = lemma;
  }
  return tokens;
}

NormalizedDocument NormalizationPipeline::Normalize(std::string doc_id,
                                                    std::string_view text) const {
  return NormalizedDocument{std::move(doc_id), NormalizeTokens(text)};
}

std::string NormalizationPipeline::Version() const {
  std::string canon;
  for (const auto &[key, value] : abbreviations_) {
    canon += "a\t" + JoinTokens(key) + "\t" + JoinTokens(value) + "\n";
  }
  for (const auto &[surface, lemma] : lemmas_) {
    canon += "l\t" + surface + "\t" + lemma + "\n";
  }
  return Sha256Hex(canon).substr(0, 16);
}

NormalizedDocument Normalize(std::string_view text,
                             const NormalizationPipeline &pipeline) {
  return pipeline.Normalize("", text);
}

TokenList ExpandAbbreviations(const TokenList &tokens,
                              const NormalizationPipeline &pipeline) {
  return pipeline.ExpandAbbreviations(tokens);
}

}  // namespace medex
