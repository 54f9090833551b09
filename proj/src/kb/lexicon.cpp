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

#include "kb/lexicon.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <json.hpp>

#include "common/error.hpp"
#include "common/io.hpp"

namespace medex {

using nlohmann::json;

namespace {

constexpr const char *kFormat = "medex-lexicon";
constexpr int kFormatVersion = 1;

size_t CountTokens(const std::string &key) {
  return key.empty() ? 0 : std::count(key.begin(), key.end(), ' ') + 1;
}

}  // namespace

NormalizedLexicon NormalizedLexicon::Build(const KnowledgeBase &kb,
                                           const NormalizationPipeline &pipeline,
                                           size_t max_term_len,
                                           std::vector<std::string> *warnings) {
  if (max_term_len < 1 || max_term_len > kMaxSupportedTermLen) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("max_term_len must be in [1, {}], got {}",
                            kMaxSupportedTermLen, max_term_len));
  }
  NormalizedLexicon lex;
  lex.max_term_len_ = max_term_len;
  lex.pipeline_ = pipeline;
  lex.kb_version_ = kb.version();

  std::map<std::string, std::string> owner;
  for (const Entity &e : kb.entities()) {
    lex.groups_[e.id] = e.group;
    for (const std::string &synonym : e.synonyms) {
      TokenList tokens = pipeline.NormalizeTokens(synonym);
      if (tokens.empty()) {
        if (warnings) {
          warnings->push_back(fmt::format(
              "{}: synonym \"{}\" has no tokens after normalization", e.id,
              synonym));
        }
        continue;
      }
      if (tokens.size() > max_term_len) {
        if (warnings) {
          warnings->push_back(fmt::format(
              "{}: synonym \"{}\" has {} tokens (max {}), skipped", e.id,
              synonym, tokens.size(), max_term_len));
        }
        continue;
      }
      std::string key = JoinTokens(tokens);
      auto [it, inserted] = owner.emplace(key, e.id);
      if (!inserted && it->second != e.id) {
        throw Error(ErrorCode::kValidation,
                    fmt::format("normalized synonym \"{}\" shared by entities "
                                "{} and {}",
                                key, it->second, e.id));
      }
    }
  }
  for (auto &[key, id] : owner) lex.entries_.push_back(Entry{key, id});
  lex.Index();
  return lex;
}

void NormalizedLexicon::Index() {
  by_key_.clear();
  first_token_mask_.clear();
  for (size_t i = 0; i < entries_.size(); ++i) {
    const std::string &key = entries_[i].key;
    by_key_.emplace(key, i);
    const size_t len = CountTokens(key);
    const std::string first = key.substr(0, key.find(' '));
    first_token_mask_[first] |= uint64_t{1} << (len - 1);
  }
}

const std::string *NormalizedLexicon::Find(
    std::span<const std::string> tokens) const {
  if (tokens.empty() || tokens.size() > max_term_len_) return nullptr;
  std::string key = tokens[0];
  for (size_t i = 1; i < tokens.size(); ++i) {
    key += ' ';
    key += tokens[i];
  }
  auto it = by_key_.find(key);
  return it == by_key_.end() ? nullptr : &entries_[it->second].entity_id;
}

uint64_t NormalizedLexicon::LengthMask(const std::string &first_token) const {
  auto it = first_token_mask_.find(first_token);
  return it == first_token_mask_.end() ? 0 : it->second;
}

std::string NormalizedLexicon::Version() const {
  return Sha256Hex(Serialize()).substr(0, 16);
}

std::string NormalizedLexicon::Serialize() const {
  json abbreviations = json::array();
  for (const auto &[key, value] : pipeline_.abbreviations()) {
    abbreviations.push_back({JoinTokens(key), JoinTokens(value)});
  }
  json lemmas = json::array();
  for (const auto &[surface, lemma] : pipeline_.lemmas()) {
    lemmas.push_back({surface, lemma});
  }
  json entities = json::array();
  for (const auto &[id, group] : groups_) entities.push_back({id, group});
  json entries = json::array();
  for (const Entry &e : entries_) entries.push_back({e.key, e.entity_id});
  json j = {{"format", kFormat},
            {"format_version", kFormatVersion},
            {"kb_version", kb_version_},
            {"pipeline_version", pipeline_.Version()},
            {"max_term_len", max_term_len_},
            {"abbreviations", std::move(abbreviations)},
            {"lemmas", std::move(lemmas)},
            {"entities", std::move(entities)},
            {"entries", std::move(entries)}};
  return j.dump(1) + "\n";
}

NormalizedLexicon NormalizedLexicon::Parse(const std::string &content,
                                           const std::string &source) {
  NormalizedLexicon lex;
  try {
    json j = json::parse(content);
    if (j.value("format", "") != kFormat) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}: not a lexicon file", source));
    }
    if (j.at("format_version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::kVersion,
                  fmt::format("{}: unsupported lexicon version", source));
    }
    lex.max_term_len_ = j.at("max_term_len").get<size_t>();
    if (lex.max_term_len_ < 1 || lex.max_term_len_ > kMaxSupportedTermLen) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("{}: bad max_term_len", source));
    }
    lex.kb_version_ = j.at("kb_version").get<std::string>();
    std::vector<std::pair<std::string, std::string>> abbreviations;
    for (const json &row : j.at("abbreviations")) {
      abbreviations.emplace_back(row.at(0).get<std::string>(),
                                 row.at(1).get<std::string>());
    }
    std::vector<std::pair<std::string, std::string>> lemmas;
    for (const json &row : j.at("lemmas")) {
      lemmas.emplace_back(row.at(0).get<std::string>(),
                          row.at(1).get<std::string>());
    }
    lex.pipeline_ = NormalizationPipeline::Create(abbreviations, lemmas);
    for (const json &row : j.at("entities")) {
      lex.groups_[row.at(0).get<std::string>()] = row.at(1).get<std::string>();
    }
    std::string previous;
    for (const json &row : j.at("entries")) {
      Entry e{row.at(0).get<std::string>(), row.at(1).get<std::string>()};
      const size_t len = CountTokens(e.key);
      if (len == 0 || len > lex.max_term_len_) {
        throw Error(ErrorCode::kValidation,
                    fmt::format("{}: key \"{}\" has bad length", source, e.key));
      }
      if (lex.groups_.count(e.entity_id) == 0) {
        throw Error(ErrorCode::kValidation,
                    fmt::format("{}: unknown entity {}", source, e.entity_id));
      }
      if (!lex.entries_.empty() && e.key <= previous) {
        throw Error(ErrorCode::kValidation,
                    fmt::format("{}: entries not sorted or duplicated at \"{}\"",
                                source, e.key));
      }
      previous = e.key;
      lex.entries_.push_back(std::move(e));
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParse, fmt::format("{}: {}", source, e.what()));
  }
  lex.Index();
  return lex;
}

void NormalizedLexicon::Save(const std::string &path) const {
  WriteFile(path, Serialize());
}

NormalizedLexicon NormalizedLexicon::Load(const std::string &path) {
  return Parse(ReadFile(path), path);
}

}  // namespace medex
