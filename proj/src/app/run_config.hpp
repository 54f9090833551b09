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


// Run configuration for the end-to-end pipeline, read from TOML:
//
//   seed, workers          top level
//   [kb]                   path, abbrev, lemmas, max_term_len, top_k,
//                          min_test_count
//   [gen]                  corpus size, Zipf exponent, noise rates,
//                          templates, train_fraction, filler_words
//   [model]                encoder shape, init, pooling, min_token_freq
//   [pretrain] [train]     optimizer and schedule
//   [eval]                 threshold, bins, averaging, simulated annotator
//
// Every key is optional; unknown keys and sections are errors. Relative
// paths resolve against the config file's directory. MEDEX_SEED in the
// environment replaces the seed, which feeds every stage.

#ifndef MEDEX_APP_RUN_CONFIG_HPP_
#define MEDEX_APP_RUN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "eval/eval.hpp"
#include "kb/lexicon.hpp"
#include "model/config.hpp"
#include "synthgen/synthgen.hpp"

namespace medex {

struct KbSettings {
  std::string path;
  std::string abbrev;
  std::string lemmas;
  size_t max_term_len = kDefaultMaxTermLen;
  size_t top_k = 10000;
  size_t min_test_count = 10;
};

struct EvalSettings {
  double threshold = 0.5;
  std::vector<size_t> bins = {0, 500, 2500, 50000};
  Averaging averaging = Averaging::kMicro;
  // Simulated human annotation of a test sample, restricted to the most
  // frequent training entities.
  size_t annotator_docs = 1500;
  size_t annotator_entities = 15;
  double annotator_miss_rate = 0.1;
  double annotator_false_positive_rate = 0.002;
};

struct RunConfig {
  uint64_t seed = 1;
  size_t workers = 1;
  KbSettings kb;
  GenConfig gen;
  double train_fraction = 0.8;
  ModelConfig model;  // vocab_size and n_entities are set from the data
  size_t min_token_freq = 2;
  PretrainConfig pretrain;
  TrainConfig train;
  EvalSettings eval;
  std::string source;  // config file path, empty when parsed from a string

  // Copies the global seed into every stage.
  void ApplySeed(uint64_t value);
  void Validate() const;
};

// base_dir resolves relative paths. The MEDEX_SEED override is not applied.
RunConfig ParseRunConfig(std::string_view text, const std::string &source,
                         const std::string &base_dir);

// Reads the file and applies MEDEX_SEED if set.
RunConfig LoadRunConfig(const std::string &path);

// Canonical TOML form with every field spelled out.
std::string DumpRunConfig(const RunConfig &config);

}  // namespace medex

#endif  // MEDEX_APP_RUN_CONFIG_HPP_
