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

// Checkpoint file layout:
//
//   "MEDEX01"
//   u64 LE header length, then a JSON header: config, step, vocabulary,
//     class entity ids, normalization tables, tensor directory
//     (name, shape, byte offset into the data section)
//   f32 LE tensor data: parameters, then Adam first and second moments
//   u32 LE CRC32 of everything before it

#ifndef MEDEX_MODEL_CHECKPOINT_HPP_
#define MEDEX_MODEL_CHECKPOINT_HPP_

#include <optional>
#include <string>
#include <vector>

#include "model/model.hpp"
#include "model/tokenizer.hpp"
#include "textnorm/textnorm.hpp"

namespace medex {

struct Checkpoint {
  ModelState state;
  Tokenizer tokenizer;
  std::vector<std::string> entities;  // class index -> entity id
  NormalizationPipeline pipeline;

  bool operator==(const Checkpoint &) const = default;
};

std::string SerializeCheckpoint(const Checkpoint &checkpoint);
Checkpoint ParseCheckpoint(const std::string &bytes, const std::string &source);

void SaveCheckpoint(const Checkpoint &checkpoint, const std::string &path);
// With `expected`, a checkpoint built for another config is rejected with
// ErrorCode::kShapeMismatch.
Checkpoint LoadCheckpoint(const std::string &path,
                          const std::optional<ModelConfig> &expected = std::nullopt);

// Throws ErrorCode::kShapeMismatch naming the first differing field.
void RequireSameConfig(const ModelConfig &expected, const ModelConfig &found);

}  // namespace medex

#endif  // MEDEX_MODEL_CHECKPOINT_HPP_
