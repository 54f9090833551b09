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

#include "labeler/labeler.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <set>
#include <span>
#include <thread>

#include <fmt/format.h>

#include "common/error.hpp"

namespace medex {

std::vector<Span> CandidateWindows(size_t n_tokens, size_t max_len) {
  if (max_len < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_len must be at least 1");
  }
  std::vector<Span> spans;
  for (size_t start = 0; start < n_tokens; ++start) {
    const size_t longest = std::min(max_len, n_tokens - start);
    for (size_t len = 1; len <= longest; ++len) spans.push_back({start, len});
  }
  return spans;
}

namespace {

// Calls fn(span, entity_id) for each hit. Windows whose first token starts
// no key of that length are skipped without building the key.
template <typename Fn>
void ForEachHit(const TokenList &tokens, const NormalizedLexicon &lexicon,
                Fn &&fn) {
  const size_t n = tokens.size();
  const size_t max_len = lexicon.max_term_len();
  for (size_t start = 0; start < n; ++start) {
    const uint64_t mask = lexicon.LengthMask(tokens[start]);
    if (mask == 0) continue;
    const size_t longest = std::min(max_len, n - start);
    for (size_t len = 1; len <= longest; ++len) {
      if ((mask & (uint64_t{1} << (len - 1))) == 0) continue;
      const std::string *id =
          lexicon.Find(std::span<const std::string>(tokens).subspan(start, len));
      if (id != nullptr) fn(Span{start, len}, *id);
    }
  }
}

}  // namespace

std::vector<Match> FindMatches(const NormalizedDocument &doc,
                               const NormalizedLexicon &lexicon) {
  std::vector<Match> matches;
  ForEachHit(doc.tokens, lexicon, [&](Span span, const std::string &id) {
    matches.push_back(Match{span, id});
  });
  return matches;
}

LabelSet LabelDocument(const NormalizedDocument &doc,
                       const NormalizedLexicon &lexicon) {
  LabelSet labels;
  labels.doc_id = doc.doc_id;
  ForEachHit(doc.tokens, lexicon, [&](Span, const std::string &id) {
    labels.entity_ids.insert(id);
  });
  return labels;
}

LabeledCorpus LabelCorpus(const std::vector<RawDocument> &docs,
                          const NormalizedLexicon &lexicon, size_t workers,
                          LabelRunSummary *summary) {
  const auto t0 = std::chrono::steady_clock::now();
  {
    std::set<std::string_view> seen;
    for (const RawDocument &d : docs) {
      if (!seen.insert(d.doc_id).second) {
        throw Error(ErrorCode::kValidation,
                    fmt::format("duplicate doc_id {}", d.doc_id));
      }
    }
  }
  workers = std::max<size_t>(1, std::min(workers, docs.size()));

  LabeledCorpus corpus;
  corpus.lexicon_version = lexicon.Version();
  corpus.pipeline_version = lexicon.pipeline().Version();
  corpus.documents.resize(docs.size());

  auto work = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      LabeledDocument &out = corpus.documents[i];
      out.document = lexicon.pipeline().Normalize(docs[i].doc_id, docs[i].text);
      out.labels = LabelDocument(out.document, lexicon);
    }
  };
  if (workers <= 1) {
    work(0, docs.size());
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    const size_t chunk = (docs.size() + workers - 1) / workers;
    for (size_t w = 0; w < workers; ++w) {
      const size_t begin = std::min(docs.size(), w * chunk);
      const size_t end = std::min(docs.size(), begin + chunk);
      threads.emplace_back([&, w, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (std::thread &t : threads) t.join();
    for (const auto &e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::sort(corpus.documents.begin(), corpus.documents.end(),
            [](const LabeledDocument &a, const LabeledDocument &b) {
              return a.document.doc_id < b.document.doc_id;
            });

  if (summary != nullptr) {
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    summary->documents = docs.size();
    summary->workers = workers;
    summary->seconds = secs;
    summary->docs_per_second = secs > 0 ? docs.size() / secs : 0.0;
  }
  return corpus;
}

std::vector<LabelSet> ExtractLabels(const LabeledCorpus &corpus) {
  std::vector<LabelSet> out;
  out.reserve(corpus.documents.size());
  for (const LabeledDocument &d : corpus.documents) out.push_back(d.labels);
  return out;
}

}  // namespace medex
