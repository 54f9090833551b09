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

#include "model/model.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "common/error.hpp"

namespace medex {
namespace {

template <class T>
void ApplyAdam(BasicModelState<T> *state, Parameters<T> &grads, const AdamConfig &adam) {
  ++state->step;
  auto p = state->params.Named();
  auto g = grads.Named();
  auto m = state->adam_m.Named();
  auto v = state->adam_v.Named();
  for (size_t i = 0; i < p.size(); ++i) {
    AdamUpdate<T>(p[i].second->data(), g[i].second->data(), m[i].second->data(),
                  v[i].second->data(), static_cast<size_t>(p[i].second->size()),
                  state->step, adam);
  }
  if (!state->params.AllFinite()) {
    throw Error(ErrorCode::kNumeric,
                fmt::format("non-finite parameter after step {}", state->step));
  }
}

std::vector<size_t> Shuffled(size_t n, std::mt19937_64 &rng) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

}  // namespace

template <class T>
BasicModelState<T> InitModel(const ModelConfig &config) {
  BasicModelState<T> state;
  state.config = config;
  state.params = InitParameters<T>(config);
  state.adam_m = Parameters<T>::Zeros(config);
  state.adam_v = Parameters<T>::Zeros(config);
  return state;
}

template <class T>
void ResetOptimizer(BasicModelState<T> *state) {
  state->adam_m.SetZero();
  state->adam_v.SetZero();
  state->step = 0;
}

template <class T>
void AdamUpdate(T *param, const T *grad, T *m, T *v, size_t n, uint64_t t,
                const AdamConfig &config) {
  const T b1 = T(config.beta1);
  const T b2 = T(config.beta2);
  const T lr = T(config.learning_rate);
  const T eps = T(config.eps);
  const T c1 = T(1) - std::pow(b1, T(t));
  const T c2 = T(1) - std::pow(b2, T(t));
  for (size_t i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (T(1) - b1) * grad[i];
    v[i] = b2 * v[i] + (T(1) - b2) * grad[i] * grad[i];
    const T m_hat = m[i] / c1;
    const T v_hat = v[i] / c2;
    param[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

template <class T>
T TrainStep(BasicModelState<T> *state, const std::vector<EncodedSequence> &batch,
            const std::vector<std::vector<size_t>> &targets, const TrainConfig &config) {
  if (batch.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training batch");
  const std::vector<double> weights =
      BatchClassWeights(targets, state->config.n_entities, config.absent_class_weight);
  Parameters<T> grads = Parameters<T>::Zeros(state->config);
  const T loss =
      ClassifierLoss<T>(state->params, state->config, batch, targets, weights, &grads);
  if (!std::isfinite(loss)) {
    throw Error(ErrorCode::kNumeric,
                fmt::format("non-finite loss at step {}", state->step + 1));
  }
  ApplyAdam(state, grads, config.adam);
  return loss;
}

MaskedSequence MaskTokens(const EncodedSequence &seq, double prob, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  MaskedSequence out{seq, {}};
  for (size_t i = 0; i < seq.ids.size(); ++i) {
    if (seq.mask[i] == 0 || seq.ids[i] < Tokenizer::kNumSpecial) continue;
    if (uniform(rng) < prob) {
      out.targets.emplace_back(i, seq.ids[i]);
      out.input.ids[i] = Tokenizer::kMask;
    }
  }
  return out;
}

template <class T>
MlmStepResult MlmStep(BasicModelState<T> *state, const std::vector<MaskedSequence> &batch,
                      const AdamConfig &adam) {
  Parameters<T> grads = Parameters<T>::Zeros(state->config);
  MlmStepResult result;
  result.loss = MlmLoss<T>(state->params, state->config, batch, &grads, &result.n_masked);
  if (result.n_masked == 0) return result;
  if (!std::isfinite(result.loss)) {
    throw Error(ErrorCode::kNumeric,
                fmt::format("non-finite masked-LM loss at step {}", state->step + 1));
  }
  ApplyAdam(state, grads, adam);
  return result;
}

std::vector<double> TrainClassifier(ModelState *state, const std::vector<TrainExample> &data,
                                    const TrainConfig &config, const StepCallback &on_step) {
  config.Validate();
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "no training examples");
  std::mt19937_64 rng(config.seed);
  std::vector<double> losses;
  for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const std::vector<size_t> order = Shuffled(data.size(), rng);
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<EncodedSequence> batch;
      std::vector<std::vector<size_t>> targets;
      for (size_t i = start; i < end; ++i) {
        batch.push_back(data[order[i]].input);
        targets.push_back(data[order[i]].targets);
      }
      losses.push_back(TrainStep<float>(state, batch, targets, config));
      if (on_step) on_step(losses.size(), losses.back());
    }
  }
  return losses;
}

std::vector<double> MlmPretrain(ModelState *state,
                                const std::vector<EncodedSequence> &corpus,
                                const PretrainConfig &config, const StepCallback &on_step) {
  config.Validate();
  if (corpus.empty()) throw Error(ErrorCode::kInvalidArgument, "empty pretraining corpus");
  std::mt19937_64 rng(config.seed);
  std::vector<size_t> order = Shuffled(corpus.size(), rng);
  size_t cursor = 0;
  std::vector<double> losses;
  for (size_t step = 0; step < config.steps; ++step) {
    std::vector<MaskedSequence> batch;
    for (size_t i = 0; i < config.batch_size; ++i) {
      if (cursor == order.size()) {
        order = Shuffled(corpus.size(), rng);
        cursor = 0;
      }
      batch.push_back(MaskTokens(corpus[order[cursor++]], config.mask_prob, rng));
    }
    const MlmStepResult r = MlmStep<float>(state, batch, config.adam);
    if (r.n_masked == 0) continue;
    losses.push_back(r.loss);
    if (on_step) on_step(step + 1, r.loss);
  }
  return losses;
}

std::vector<double> PredictProbabilities(const ModelState &state,
                                         const EncodedSequence &seq) {
  Mat<float> logits = ForwardLogits<float>(state.params, state.config, {seq});
  std::vector<double> p(static_cast<size_t>(logits.cols()));
  for (size_t c = 0; c < p.size(); ++c) {
    p[c] = 1.0 / (1.0 + std::exp(-double(logits(0, static_cast<Eigen::Index>(c)))));
  }
  return p;
}

std::vector<size_t> PredictClasses(const ModelState &state, const EncodedSequence &seq,
                                   double threshold) {
  if (!(threshold > 0 && threshold < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must be in (0, 1)");
  }
  std::vector<size_t> out;
  const std::vector<double> p = PredictProbabilities(state, seq);
  for (size_t c = 0; c < p.size(); ++c) {
    if (p[c] > threshold) out.push_back(c);
  }
  return out;
}

std::vector<std::vector<size_t>> PredictBatch(const ModelState &state,
                                              const std::vector<EncodedSequence> &seqs,
                                              double threshold, size_t workers) {
  std::vector<std::vector<size_t>> out(seqs.size());
  workers = std::max<size_t>(1, std::min(workers, seqs.size()));
  if (workers <= 1) {
    for (size_t i = 0; i < seqs.size(); ++i) out[i] = PredictClasses(state, seqs[i], threshold);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  const size_t chunk = (seqs.size() + workers - 1) / workers;
  for (size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        const size_t end = std::min(seqs.size(), (w + 1) * chunk);
        for (size_t i = w * chunk; i < end; ++i) {
          out[i] = PredictClasses(state, seqs[i], threshold);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread &t : threads) t.join();
  for (const std::exception_ptr &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

#define MEDEX_INSTANTIATE(T)                                                        \
  template BasicModelState<T> InitModel<T>(const ModelConfig &);                    \
  template void ResetOptimizer<T>(BasicModelState<T> *);                            \
  template void AdamUpdate<T>(T *, const T *, T *, T *, size_t, uint64_t,           \
                              const AdamConfig &);                                  \
  template T TrainStep<T>(BasicModelState<T> *, const std::vector<EncodedSequence> &, \
                          const std::vector<std::vector<size_t>> &,                 \
                          const TrainConfig &);                                     \
  template MlmStepResult MlmStep<T>(BasicModelState<T> *,                           \
                                    const std::vector<MaskedSequence> &,            \
                                    const AdamConfig &);

MEDEX_INSTANTIATE(float)
MEDEX_INSTANTIATE(double)

#undef MEDEX_INSTANTIATE

}  // namespace medex
