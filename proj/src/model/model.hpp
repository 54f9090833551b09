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

// Model state, optimizer, training loops and inference.

#ifndef MEDEX_MODEL_MODEL_HPP_
#define MEDEX_MODEL_MODEL_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "model/config.hpp"
#include "model/tokenizer.hpp"
#include "model/transformer.hpp"

namespace medex {

template <class T>
struct BasicModelState {
  ModelConfig config;
  Parameters<T> params;
  Parameters<T> adam_m;
  Parameters<T> adam_v;
  uint64_t step = 0;

  bool operator==(const BasicModelState &) const = default;
};

using ModelState = BasicModelState<float>;

template <class T>
BasicModelState<T> InitModel(const ModelConfig &config);

// Clears the Adam moments and the step counter.
template <class T>
void ResetOptimizer(BasicModelState<T> *state);

// One Adam update of n values at step t (1-based).
template <class T>
void AdamUpdate(T *param, const T *grad, T *m, T *v, size_t n, uint64_t t,
                const AdamConfig &config);

// Weighted BCE step. Returns the loss before the update. A non-finite loss
// or parameter aborts with ErrorCode::kNumeric.
template <class T>
T TrainStep(BasicModelState<T> *state, const std::vector<EncodedSequence> &batch,
            const std::vector<std::vector<size_t>> &targets, const TrainConfig &config);

// Masks each non-special real token independently with probability prob.
MaskedSequence MaskTokens(const EncodedSequence &seq, double prob, std::mt19937_64 &rng);

struct MlmStepResult {
  double loss = 0;
  size_t n_masked = 0;  // no update happens when zero
};

template <class T>
MlmStepResult MlmStep(BasicModelState<T> *state, const std::vector<MaskedSequence> &batch,
                      const AdamConfig &adam);

struct TrainExample {
  EncodedSequence input;
  std::vector<size_t> targets;
};

// Called after each optimizer step with the 1-based step number.
using StepCallback = std::function<void(size_t step, double loss)>;

// epochs passes over a seeded shuffle of the data; the last batch of an
// epoch may be short. Returns the per-step losses.
std::vector<double> TrainClassifier(ModelState *state, const std::vector<TrainExample> &data,
                                    const TrainConfig &config,
                                    const StepCallback &on_step = {});

// config.steps masked-LM steps over a seeded, cycling shuffle of the corpus.
// Returns the losses of the steps that had masked positions.
std::vector<double> MlmPretrain(ModelState *state,
                                const std::vector<EncodedSequence> &corpus,
                                const PretrainConfig &config,
                                const StepCallback &on_step = {});

std::vector<double> PredictProbabilities(const ModelState &state,
                                         const EncodedSequence &seq);

// Classes whose sigmoid is strictly above threshold.
std::vector<size_t> PredictClasses(const ModelState &state, const EncodedSequence &seq,
                                   double threshold);

std::vector<std::vector<size_t>> PredictBatch(const ModelState &state,
                                              const std::vector<EncodedSequence> &seqs,
                                              double threshold, size_t workers);

}  // namespace medex

#endif  // MEDEX_MODEL_MODEL_HPP_
