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

// Post-LN transformer encoder with a multi-label head and a tied-embedding
// masked-LM output, with hand-written backpropagation.
//
// Activations are row-major (positions x features) and linear layers are
// applied as x * W + b. Only positions with mask 1 are computed; they keep
// their original position embeddings, which is equivalent to masking the
// padding out of attention. Everything is templated on the scalar type:
// float for training, double for gradient checks.

#ifndef MEDEX_MODEL_TRANSFORMER_HPP_
#define MEDEX_MODEL_TRANSFORMER_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "model/config.hpp"
#include "model/tokenizer.hpp"

namespace medex {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class T>
struct LayerParams {
  Mat<T> wq, bq, wk, bk, wv, bv, wo, bo;
  Mat<T> ln1_g, ln1_b;
  Mat<T> w1, b1, w2, b2;
  Mat<T> ln2_g, ln2_b;
};

template <class T>
struct Parameters {
  Mat<T> tok_emb;  // vocab x d, tied with the masked-LM output
  Mat<T> pos_emb;  // max_seq_len x d
  Mat<T> emb_ln_g, emb_ln_b;
  std::vector<LayerParams<T>> layers;
  Mat<T> head_w;  // K x d
  Mat<T> head_b;  // 1 x K
  Mat<T> mlm_bias;  // 1 x vocab

  static Parameters Zeros(const ModelConfig &config);

  // Every tensor with a stable name, in a fixed order.
  std::vector<std::pair<std::string, Mat<T> *>> Named();
  std::vector<std::pair<std::string, const Mat<T> *>> Named() const;

  void SetZero();
  size_t NumValues() const;
  bool AllFinite() const;
  bool operator==(const Parameters &other) const;
};

// Head weights from N(head_init_mean, head_init_std), other matrices from
// N(0, init_std), biases zero, layer-norm gains one. Values are drawn in
// double, so float and double models from one seed agree up to rounding.
template <class T>
Parameters<T> InitParameters(const ModelConfig &config);

// Logits for each sequence, batch x K.
template <class T>
Mat<T> ForwardLogits(const Parameters<T> &params, const ModelConfig &config,
                     const std::vector<EncodedSequence> &batch);

// weight_c = 1 if some example in the batch has class c, else lambda.
std::vector<double> BatchClassWeights(const std::vector<std::vector<size_t>> &targets,
                                      size_t n_classes, double lambda);

// Mean over batch and classes of weight_c * BCE(sigmoid(logit), target).
// Gradients are accumulated into grads when it is non-null.
template <class T>
T ClassifierLoss(const Parameters<T> &params, const ModelConfig &config,
                 const std::vector<EncodedSequence> &batch,
                 const std::vector<std::vector<size_t>> &targets,
                 const std::vector<double> &class_weights, Parameters<T> *grads);

struct MaskedSequence {
  EncodedSequence input;  // with masked positions replaced by [MASK]
  std::vector<std::pair<size_t, int32_t>> targets;  // position, original id
};

// Mean cross-entropy over all masked positions of the batch; zero if there
// are none. n_masked receives the number of positions.
template <class T>
T MlmLoss(const Parameters<T> &params, const ModelConfig &config,
          const std::vector<MaskedSequence> &batch, Parameters<T> *grads,
          size_t *n_masked);

}  // namespace medex

#endif  // MEDEX_MODEL_TRANSFORMER_HPP_
