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

// Distant-supervision labeler. Every contiguous token window of length
// 1..max_term_len is looked up in the lexicon; each exact hit contributes its
// entity to the document's label set. Overlapping and nested hits all count.

#ifndef MEDEX_LABELER_LABELER_HPP_
#define MEDEX_LABELER_LABELER_HPP_

#include <string>
#include <vector>

#include "common/records.hpp"
#include "kb/lexicon.hpp"
#include "textnorm/textnorm.hpp"

namespace medex {

struct Span {
  size_t start = 0;
  size_t length = 0;
  bool operator==(const Span &) const = default;
};

// All spans of length 1..min(max_len, n_tokens), ordered by start, then
// length.
std::vector<Span> CandidateWindows(size_t n_tokens, size_t max_len);

struct Match {
  Span span;
  std::string entity_id;
};

// Every lexicon hit with its span, in window order. Debug use.
std::vector<Match> FindMatches(const NormalizedDocument &doc,
                               const NormalizedLexicon &lexicon);

LabelSet LabelDocument(const NormalizedDocument &doc,
                       const NormalizedLexicon &lexicon);

struct LabeledDocument {
  NormalizedDocument document;
  LabelSet labels;
};

struct LabeledCorpus {
  std::vector<LabeledDocument> documents;  // sorted by doc_id
  std::string lexicon_version;
  std::string pipeline_version;
};

struct LabelRunSummary {
  size_t documents = 0;
  size_t workers = 1;
  double seconds = 0.0;
  double docs_per_second = 0.0;
};

// Normalizes and labels every document. Work is split across `workers`
// threads; output is sorted by doc_id and does not depend on the worker
// count. Throws on duplicate doc ids.
LabeledCorpus LabelCorpus(const std::vector<RawDocument> &docs,
                          const NormalizedLexicon &lexicon, size_t workers,
                          LabelRunSummary *summary = nullptr);

std::vector<LabelSet> ExtractLabels(const LabeledCorpus &corpus);

}  // namespace medex

#endif  // MEDEX_LABELER_LABELER_HPP_
