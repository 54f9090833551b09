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

#ifndef MEDEX_MODEL_CONFIG_HPP_
#define MEDEX_MODEL_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <string>

namespace medex {

enum class Pooling { kCls, kMean };

const char *PoolingName(Pooling pooling);
Pooling ParsePooling(const std::string &name);

struct ModelConfig {
  size_t vocab_size = 0;
  size_t d_model = 64;
  size_t n_layers = 2;
  size_t n_heads = 4;
  size_t ffn_dim = 128;
  // Includes the CLS position.
  size_t max_seq_len = 64;
  size_t n_entities = 50;
  double head_init_mean = -0.1;
  double head_init_std = 0.11;
  double init_std = 0.02;
  double layer_norm_eps = 1e-5;
  Pooling pooling = Pooling::kCls;
  uint64_t seed = 1;

  void Validate() const;
  bool operator==(const ModelConfig &) const = default;
};

struct AdamConfig {
  double learning_rate = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void Validate() const;
};

struct TrainConfig {
  AdamConfig adam;
  size_t batch_size = 20;
  size_t epochs = 1;
  // Weight of classes with no positive example in the batch.
  double absent_class_weight = 0.05;
  double predict_threshold = 0.5;
  uint64_t seed = 1;

  void Validate() const;
};

struct PretrainConfig {
  AdamConfig adam{1e-3};
  size_t batch_size = 20;
  size_t steps = 200;
  double mask_prob = 0.15;
  uint64_t seed = 1;

  void Validate() const;
};

}  // namespace medex

#endif  // MEDEX_MODEL_CONFIG_HPP_
