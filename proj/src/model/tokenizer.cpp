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

#include "model/tokenizer.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "common/error.hpp"

namespace medex {
namespace {

const char *const kSpecialTokens[] = {"[PAD]", "[UNK]", "[CLS]", "[MASK]"};

}  // namespace

Tokenizer Tokenizer::Build(const std::vector<TokenList> &corpus,
                           size_t min_freq, size_t max_seq_len) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot build a vocabulary from an empty corpus");
  }
  std::map<std::string, size_t> freq;
  for (const TokenList &doc : corpus) {
    for (const std::string &t : doc) ++freq[t];
  }
  std::vector<std::pair<std::string, size_t>> kept;
  for (const auto &[token, n] : freq) {
    if (n >= std::max<size_t>(min_freq, 1)) kept.emplace_back(token, n);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto &a, const auto &b) { return a.second > b.second; });
  std::vector<std::string> vocab(std::begin(kSpecialTokens), std::end(kSpecialTokens));
  for (auto &[token, n] : kept) vocab.push_back(std::move(token));
  return FromVocab(std::move(vocab), max_seq_len);
}

Tokenizer Tokenizer::FromVocab(std::vector<std::string> vocab, size_t max_seq_len) {
  if (max_seq_len < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_seq_len must be positive");
  }
  if (vocab.size() < static_cast<size_t>(kNumSpecial) ||
      !std::equal(std::begin(kSpecialTokens), std::end(kSpecialTokens), vocab.begin())) {
    throw Error(ErrorCode::kValidation, "vocabulary must start with the special tokens");
  }
  Tokenizer tok;
  tok.max_seq_len_ = max_seq_len;
  for (size_t i = 0; i < vocab.size(); ++i) {
    if (!tok.index_.emplace(vocab[i], static_cast<int32_t>(i)).second) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("duplicate vocabulary token \"{}\"", vocab[i]));
    }
  }
  tok.vocab_ = std::move(vocab);
  return tok;
}

int32_t Tokenizer::Id(const std::string &token) const {
  auto it = index_.find(token);
  if (it == index_.end() || it->second < kNumSpecial) return kUnk;
  return it->second;
}

EncodedSequence Tokenizer::Encode(const TokenList &tokens) const {
  EncodedSequence seq;
  seq.ids.assign(max_seq_len_, kPad);
  seq.mask.assign(max_seq_len_, 0);
  seq.ids[0] = kCls;
  seq.mask[0] = 1;
  const size_t n = std::min(tokens.size(), max_seq_len_ - 1);
  for (size_t i = 0; i < n; ++i) {
    seq.ids[i + 1] = Id(tokens[i]);
    seq.mask[i + 1] = 1;
  }
  return seq;
}

}  // namespace medex
