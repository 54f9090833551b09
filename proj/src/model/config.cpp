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

#include "model/config.hpp"

#include <cmath>

#include <fmt/format.h>

#include "common/error.hpp"

namespace medex {
namespace {

void Require(bool ok, const std::string &what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

bool Probability(double p) { return std::isfinite(p) && p >= 0 && p <= 1; }

}  // namespace

const char *PoolingName(Pooling pooling) {
  return pooling == Pooling::kCls ? "cls" : "mean";
}

Pooling ParsePooling(const std::string &name) {
  if (name == "cls") return Pooling::kCls;
  if (name == "mean") return Pooling::kMean;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown pooling \"{}\" (expected cls or mean)", name));
}

void ModelConfig::Validate() const {
  Require(vocab_size > 4, "model vocab_size must exceed the 4 special tokens");
  Require(d_model > 0 && n_heads > 0, "d_model and n_heads must be positive");
  Require(d_model % n_heads == 0,
          fmt::format("d_model {} is not divisible by n_heads {}", d_model, n_heads));
  Require(ffn_dim > 0, "ffn_dim must be positive");
  Require(max_seq_len >= 2, "max_seq_len must be at least 2");
  Require(n_entities >= 1, "n_entities must be at least 1");
  Require(std::isfinite(head_init_mean), "head_init_mean must be finite");
  Require(std::isfinite(head_init_std) && head_init_std >= 0,
          "head_init_std must be non-negative");
  Require(std::isfinite(init_std) && init_std >= 0, "init_std must be non-negative");
  Require(std::isfinite(layer_norm_eps) && layer_norm_eps > 0,
          "layer_norm_eps must be positive");
}

void AdamConfig::Validate() const {
  Require(std::isfinite(learning_rate) && learning_rate > 0,
          "learning_rate must be positive");
  Require(beta1 >= 0 && beta1 < 1, "adam beta1 must be in [0, 1)");
  Require(beta2 >= 0 && beta2 < 1, "adam beta2 must be in [0, 1)");
  Require(std::isfinite(eps) && eps > 0, "adam eps must be positive");
}

void TrainConfig::Validate() const {
  adam.Validate();
  Require(batch_size >= 1, "batch_size must be at least 1");
  Require(epochs >= 1, "epochs must be at least 1");
  Require(absent_class_weight > 0 && absent_class_weight <= 1,
          "absent_class_weight must be in (0, 1]");
  Require(predict_threshold > 0 && predict_threshold < 1,
          "predict_threshold must be in (0, 1)");
}

void PretrainConfig::Validate() const {
  adam.Validate();
  Require(batch_size >= 1, "pretrain batch_size must be at least 1");
  Require(Probability(mask_prob), "mask_prob must be in [0, 1]");
}

}  // namespace medex
