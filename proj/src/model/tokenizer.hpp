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

// Word-level tokenizer over normalized tokens.

#ifndef MEDEX_MODEL_TOKENIZER_HPP_
#define MEDEX_MODEL_TOKENIZER_HPP_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "textnorm/textnorm.hpp"

namespace medex {

// Fixed-length model input. mask[i] is 1 for real positions, 0 for padding.
struct EncodedSequence {
  std::vector<int32_t> ids;
  std::vector<uint8_t> mask;

  bool operator==(const EncodedSequence &) const = default;
};

class Tokenizer {
 public:
  static constexpr int32_t kPad = 0;
  static constexpr int32_t kUnk = 1;
  static constexpr int32_t kCls = 2;
  static constexpr int32_t kMask = 3;
  static constexpr int32_t kNumSpecial = 4;

  Tokenizer() = default;

  // Keeps tokens seen at least min_freq times. Ids follow descending
  // frequency, ties broken lexicographically.
  static Tokenizer Build(const std::vector<TokenList> &corpus, size_t min_freq,
                         size_t max_seq_len);
  // vocab must start with the four special tokens.
  static Tokenizer FromVocab(std::vector<std::string> vocab, size_t max_seq_len);

  int32_t Id(const std::string &token) const;
  const std::string &Token(int32_t id) const { return vocab_.at(id); }
  size_t size() const { return vocab_.size(); }
  size_t max_seq_len() const { return max_seq_len_; }
  const std::vector<std::string> &vocab() const { return vocab_; }

  // [CLS] + token ids, truncated to max_seq_len, padded with [PAD].
  EncodedSequence Encode(const TokenList &tokens) const;

  bool operator==(const Tokenizer &other) const {
    return vocab_ == other.vocab_ && max_seq_len_ == other.max_seq_len_;
  }

 private:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int32_t> index_;
  size_t max_seq_len_ = 0;
};

}  // namespace medex

#endif  // MEDEX_MODEL_TOKENIZER_HPP_
