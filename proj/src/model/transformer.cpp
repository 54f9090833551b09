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

#include "model/transformer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "common/error.hpp"

namespace medex {
namespace {

using Index = Eigen::Index;

template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;

template <class T>
T Sigmoid(T z) {
  if (z >= 0) return T(1) / (T(1) + std::exp(-z));
  const T e = std::exp(z);
  return e / (T(1) + e);
}

template <class T>
T Gelu(T x) {
  return T(0.5) * x * (T(1) + std::erf(x * T(0.70710678118654752440)));
}

template <class T>
T GeluGrad(T x) {
  return T(0.5) * (T(1) + std::erf(x * T(0.70710678118654752440))) +
         x * std::exp(T(-0.5) * x * x) * T(0.39894228040143267794);
}

template <class T>
Mat<T> Linear(const Mat<T> &x, const Mat<T> &w, const Mat<T> &b) {
  Mat<T> y = x * w;
  y.rowwise() += b.row(0);
  return y;
}

template <class T>
struct LnCache {
  Mat<T> xhat;
  Vec<T> inv_std;
};

template <class T>
Mat<T> LayerNorm(const Mat<T> &x, const Mat<T> &g, const Mat<T> &b, T eps,
                 LnCache<T> *cache) {
  const Index n = x.rows(), d = x.cols();
  Mat<T> xhat(n, d);
  Vec<T> inv(n);
  for (Index i = 0; i < n; ++i) {
    const T mean = x.row(i).mean();
    RowVec<T> centered = (x.row(i).array() - mean).matrix();
    const T var = centered.squaredNorm() / T(d);
    inv(i) = T(1) / std::sqrt(var + eps);
    xhat.row(i) = centered * inv(i);
  }
  Mat<T> y(n, d);
  for (Index i = 0; i < n; ++i) {
    y.row(i) = xhat.row(i).cwiseProduct(g.row(0)) + b.row(0);
  }
  if (cache != nullptr) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv);
  }
  return y;
}

template <class T>
Mat<T> LayerNormBackward(const Mat<T> &dy, const Mat<T> &g, const LnCache<T> &c,
                         Mat<T> *dg, Mat<T> *db) {
  const Index n = dy.rows(), d = dy.cols();
  Mat<T> dx(n, d);
  for (Index i = 0; i < n; ++i) {
    RowVec<T> dxhat = dy.row(i).cwiseProduct(g.row(0));
    dg->row(0) += dy.row(i).cwiseProduct(c.xhat.row(i));
    db->row(0) += dy.row(i);
    const T m1 = dxhat.mean();
    const T m2 = dxhat.cwiseProduct(c.xhat.row(i)).mean();
    dx.row(i) =
        c.inv_std(i) * (dxhat.array() - m1 - c.xhat.row(i).array() * m2).matrix();
  }
  return dx;
}

template <class T>
struct LayerCache {
  Mat<T> input, q, k, v, ctx, h1, pre, act;
  std::vector<Mat<T>> probs;
  LnCache<T> ln1, ln2;
};

template <class T>
struct EncoderCache {
  LnCache<T> emb_ln;
  std::vector<LayerCache<T>> layers;
};

struct Gathered {
  std::vector<int32_t> ids;
  std::vector<int32_t> positions;
};

Gathered Gather(const EncodedSequence &seq, const ModelConfig &config) {
  if (seq.ids.size() != seq.mask.size() || seq.ids.size() > config.max_seq_len) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("sequence of length {} (mask {}) does not fit max_seq_len {}",
                            seq.ids.size(), seq.mask.size(), config.max_seq_len));
  }
  Gathered g;
  for (size_t i = 0; i < seq.ids.size(); ++i) {
    if (seq.mask[i] == 0) continue;
    const int32_t id = seq.ids[i];
    if (id < 0 || static_cast<size_t>(id) >= config.vocab_size) {
      throw Error(ErrorCode::kShapeMismatch,
                  fmt::format("token id {} outside vocabulary of {}", id,
                              config.vocab_size));
    }
    g.ids.push_back(id);
    g.positions.push_back(static_cast<int32_t>(i));
  }
  if (g.ids.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "sequence has no unmasked position");
  }
  if (config.pooling == Pooling::kCls && g.positions[0] != 0) {
    throw Error(ErrorCode::kShapeMismatch, "CLS position is masked");
  }
  return g;
}

template <class T>
void CheckShapes(const Parameters<T> &p, const ModelConfig &config) {
  Parameters<T> expected = Parameters<T>::Zeros(config);
  auto a = p.Named();
  auto b = expected.Named();
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("model has {} tensors, config implies {}", a.size(),
                            b.size()));
  }
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].second->rows() != b[i].second->rows() ||
        a[i].second->cols() != b[i].second->cols()) {
      throw Error(ErrorCode::kShapeMismatch,
                  fmt::format("tensor {} is {}x{}, config implies {}x{}", a[i].first,
                              a[i].second->rows(), a[i].second->cols(),
                              b[i].second->rows(), b[i].second->cols()));
    }
  }
}

template <class T>
Mat<T> Encode(const Parameters<T> &p, const ModelConfig &config, const Gathered &in,
              EncoderCache<T> *cache) {
  const Index n = static_cast<Index>(in.ids.size());
  const Index d = static_cast<Index>(config.d_model);
  const Index heads = static_cast<Index>(config.n_heads);
  const Index dh = d / heads;
  const T scale = T(1) / std::sqrt(T(dh));
  const T eps = T(config.layer_norm_eps);

  Mat<T> x(n, d);
  for (Index i = 0; i < n; ++i) {
    x.row(i) = p.tok_emb.row(in.ids[i]) + p.pos_emb.row(in.positions[i]);
  }
  Mat<T> h = LayerNorm<T>(x, p.emb_ln_g, p.emb_ln_b, eps,
                          cache ? &cache->emb_ln : nullptr);
  for (const LayerParams<T> &layer : p.layers) {
    LayerCache<T> lc;
    Mat<T> q = Linear(h, layer.wq, layer.bq);
    Mat<T> k = Linear(h, layer.wk, layer.bk);
    Mat<T> v = Linear(h, layer.wv, layer.bv);
    Mat<T> ctx(n, d);
    std::vector<Mat<T>> probs(heads);
    for (Index hd = 0; hd < heads; ++hd) {
      Mat<T> s = q.middleCols(hd * dh, dh) * k.middleCols(hd * dh, dh).transpose();
      s *= scale;
      for (Index i = 0; i < n; ++i) {
        const T mx = s.row(i).maxCoeff();
        s.row(i) = (s.row(i).array() - mx).exp().matrix();
        s.row(i) /= s.row(i).sum();
      }
      ctx.middleCols(hd * dh, dh) = s * v.middleCols(hd * dh, dh);
      probs[hd] = std::move(s);
    }
    Mat<T> h1 = LayerNorm<T>(h + Linear(ctx, layer.wo, layer.bo), layer.ln1_g,
                             layer.ln1_b, eps, cache ? &lc.ln1 : nullptr);
    Mat<T> pre = Linear(h1, layer.w1, layer.b1);
    Mat<T> act = pre.unaryExpr([](T z) { return Gelu(z); });
    Mat<T> out = LayerNorm<T>(h1 + Linear(act, layer.w2, layer.b2), layer.ln2_g,
                              layer.ln2_b, eps, cache ? &lc.ln2 : nullptr);
    if (cache != nullptr) {
      lc.input = std::move(h);
      lc.q = std::move(q);
      lc.k = std::move(k);
      lc.v = std::move(v);
      lc.ctx = std::move(ctx);
      lc.h1 = std::move(h1);
      lc.pre = std::move(pre);
      lc.act = std::move(act);
      lc.probs = std::move(probs);
      cache->layers.push_back(std::move(lc));
    }
    h = std::move(out);
  }
  return h;
}

template <class T>
void EncodeBackward(const Parameters<T> &p, const ModelConfig &config,
                    const Gathered &in, const EncoderCache<T> &cache, Mat<T> dh,
                    Parameters<T> *g) {
  const Index n = dh.rows();
  const Index d = static_cast<Index>(config.d_model);
  const Index heads = static_cast<Index>(config.n_heads);
  const Index hd_size = d / heads;
  const T scale = T(1) / std::sqrt(T(hd_size));

  for (size_t l = p.layers.size(); l-- > 0;) {
    const LayerParams<T> &P = p.layers[l];
    LayerParams<T> &G = g->layers[l];
    const LayerCache<T> &lc = cache.layers[l];

    Mat<T> dsum2 = LayerNormBackward(dh, P.ln2_g, lc.ln2, &G.ln2_g, &G.ln2_b);
    G.w2.noalias() += lc.act.transpose() * dsum2;
    G.b2 += dsum2.colwise().sum();
    Mat<T> dpre = (dsum2 * P.w2.transpose())
                      .cwiseProduct(lc.pre.unaryExpr([](T z) { return GeluGrad(z); }));
    G.w1.noalias() += lc.h1.transpose() * dpre;
    G.b1 += dpre.colwise().sum();
    Mat<T> dh1 = dsum2 + dpre * P.w1.transpose();

    Mat<T> dsum1 = LayerNormBackward(dh1, P.ln1_g, lc.ln1, &G.ln1_g, &G.ln1_b);
    G.wo.noalias() += lc.ctx.transpose() * dsum1;
    G.bo += dsum1.colwise().sum();
    Mat<T> dctx = dsum1 * P.wo.transpose();

    Mat<T> dq(n, d), dk(n, d), dv(n, d);
    for (Index hd = 0; hd < heads; ++hd) {
      const Mat<T> &prob = lc.probs[hd];
      const Index off = hd * hd_size;
      Mat<T> dctx_h = dctx.middleCols(off, hd_size);
      Mat<T> dprob = dctx_h * lc.v.middleCols(off, hd_size).transpose();
      dv.middleCols(off, hd_size) = prob.transpose() * dctx_h;
      Vec<T> rs = dprob.cwiseProduct(prob).rowwise().sum();
      Mat<T> ds = prob.cwiseProduct(dprob.colwise() - rs);
      ds *= scale;
      dq.middleCols(off, hd_size) = ds * lc.k.middleCols(off, hd_size);
      dk.middleCols(off, hd_size) = ds.transpose() * lc.q.middleCols(off, hd_size);
    }
    G.wq.noalias() += lc.input.transpose() * dq;
    G.bq += dq.colwise().sum();
    G.wk.noalias() += lc.input.transpose() * dk;
    G.bk += dk.colwise().sum();
    G.wv.noalias() += lc.input.transpose() * dv;
    G.bv += dv.colwise().sum();
    dh = dsum1 + dq * P.wq.transpose() + dk * P.wk.transpose() +
         dv * P.wv.transpose();
  }
  Mat<T> dx = LayerNormBackward(dh, p.emb_ln_g, cache.emb_ln, &g->emb_ln_g,
                                &g->emb_ln_b);
  for (Index i = 0; i < n; ++i) {
    g->tok_emb.row(in.ids[i]) += dx.row(i);
    g->pos_emb.row(in.positions[i]) += dx.row(i);
  }
}

template <class T>
Mat<T> Pool(const Mat<T> &hidden, Pooling pooling) {
  if (pooling == Pooling::kCls) return hidden.topRows(1);
  return hidden.colwise().mean();
}

template <class T>
Mat<T> PoolBackward(const Mat<T> &dpooled, Index n, Pooling pooling) {
  Mat<T> dh = Mat<T>::Zero(n, dpooled.cols());
  if (pooling == Pooling::kCls) {
    dh.row(0) = dpooled.row(0);
  } else {
    for (Index i = 0; i < n; ++i) dh.row(i) = dpooled.row(0) / T(n);
  }
  return dh;
}

bool IsGain(const std::string &base) {
  return base == "emb_ln_g" || base == "ln1_g" || base == "ln2_g";
}

bool IsRandomWeight(const std::string &base) {
  return base == "tok_emb" || base == "pos_emb" || base == "wq" || base == "wk" ||
         base == "wv" || base == "wo" || base == "w1" || base == "w2";
}

}  // namespace

template <class T>
Parameters<T> Parameters<T>::Zeros(const ModelConfig &config) {
  const Index d = static_cast<Index>(config.d_model);
  const Index v = static_cast<Index>(config.vocab_size);
  const Index f = static_cast<Index>(config.ffn_dim);
  const Index k = static_cast<Index>(config.n_entities);
  Parameters p;
  p.tok_emb = Mat<T>::Zero(v, d);
  p.pos_emb = Mat<T>::Zero(static_cast<Index>(config.max_seq_len), d);
  p.emb_ln_g = Mat<T>::Zero(1, d);
  p.emb_ln_b = Mat<T>::Zero(1, d);
  p.layers.resize(config.n_layers);
  for (LayerParams<T> &l : p.layers) {
    for (Mat<T> *w : {&l.wq, &l.wk, &l.wv, &l.wo}) *w = Mat<T>::Zero(d, d);
    for (Mat<T> *b : {&l.bq, &l.bk, &l.bv, &l.bo, &l.ln1_g, &l.ln1_b, &l.b2,
                      &l.ln2_g, &l.ln2_b}) {
      *b = Mat<T>::Zero(1, d);
    }
    l.w1 = Mat<T>::Zero(d, f);
    l.b1 = Mat<T>::Zero(1, f);
    l.w2 = Mat<T>::Zero(f, d);
  }
  p.head_w = Mat<T>::Zero(k, d);
  p.head_b = Mat<T>::Zero(1, k);
  p.mlm_bias = Mat<T>::Zero(1, v);
  return p;
}

template <class T>
std::vector<std::pair<std::string, Mat<T> *>> Parameters<T>::Named() {
  std::vector<std::pair<std::string, Mat<T> *>> out = {{"tok_emb", &tok_emb},
                                                       {"pos_emb", &pos_emb},
                                                       {"emb_ln_g", &emb_ln_g},
                                                       {"emb_ln_b", &emb_ln_b}};
  for (size_t i = 0; i < layers.size(); ++i) {
    LayerParams<T> &l = layers[i];
    const std::string prefix = fmt::format("layer{}.", i);
    const std::pair<const char *, Mat<T> *> members[] = {
        {"wq", &l.wq},       {"bq", &l.bq},       {"wk", &l.wk}, {"bk", &l.bk},
        {"wv", &l.wv},       {"bv", &l.bv},       {"wo", &l.wo}, {"bo", &l.bo},
        {"ln1_g", &l.ln1_g}, {"ln1_b", &l.ln1_b}, {"w1", &l.w1}, {"b1", &l.b1},
        {"w2", &l.w2},       {"b2", &l.b2},       {"ln2_g", &l.ln2_g},
        {"ln2_b", &l.ln2_b}};
    for (const auto &[name, m] : members) out.emplace_back(prefix + name, m);
  }
  out.emplace_back("head_w", &head_w);
  out.emplace_back("head_b", &head_b);
  out.emplace_back("mlm_bias", &mlm_bias);
  return out;
}

template <class T>
std::vector<std::pair<std::string, const Mat<T> *>> Parameters<T>::Named() const {
  std::vector<std::pair<std::string, const Mat<T> *>> out;
  for (auto &[name, m] : const_cast<Parameters *>(this)->Named()) {
    out.emplace_back(std::move(name), m);
  }
  return out;
}

template <class T>
void Parameters<T>::SetZero() {
  for (auto &[name, m] : Named()) m->setZero();
}

template <class T>
size_t Parameters<T>::NumValues() const {
  size_t n = 0;
  for (const auto &[name, m] : Named()) n += static_cast<size_t>(m->size());
  return n;
}

template <class T>
bool Parameters<T>::AllFinite() const {
  for (const auto &[name, m] : Named()) {
    if (!m->allFinite()) return false;
  }
  return true;
}

template <class T>
bool Parameters<T>::operator==(const Parameters &other) const {
  auto a = Named();
  auto b = other.Named();
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    const Mat<T> &x = *a[i].second;
    const Mat<T> &y = *b[i].second;
    if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
    if (x.size() > 0 && !(x.array() == y.array()).all()) return false;
  }
  return true;
}

template <class T>
Parameters<T> InitParameters(const ModelConfig &config) {
  config.Validate();
  Parameters<T> p = Parameters<T>::Zeros(config);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> weight(0.0, config.init_std);
  std::normal_distribution<double> head(config.head_init_mean, config.head_init_std);
  for (auto &[name, m] : p.Named()) {
    const std::string base = name.substr(name.find('.') + 1);
    if (IsGain(base)) {
      m->setOnes();
    } else if (base == "head_w") {
      for (Index i = 0; i < m->size(); ++i) m->data()[i] = T(head(rng));
    } else if (IsRandomWeight(base)) {
      for (Index i = 0; i < m->size(); ++i) m->data()[i] = T(weight(rng));
    }
  }
  return p;
}

template <class T>
Mat<T> ForwardLogits(const Parameters<T> &params, const ModelConfig &config,
                     const std::vector<EncodedSequence> &batch) {
  CheckShapes(params, config);
  Mat<T> logits(static_cast<Index>(batch.size()),
                static_cast<Index>(config.n_entities));
  for (size_t b = 0; b < batch.size(); ++b) {
    const Gathered in = Gather(batch[b], config);
    Mat<T> pooled = Pool<T>(Encode<T>(params, config, in, nullptr), config.pooling);
    logits.row(static_cast<Index>(b)) =
        pooled * params.head_w.transpose() + params.head_b;
  }
  return logits;
}

std::vector<double> BatchClassWeights(const std::vector<std::vector<size_t>> &targets,
                                      size_t n_classes, double lambda) {
  if (!(lambda > 0 && lambda <= 1)) {
    throw Error(ErrorCode::kInvalidArgument, "class weight lambda must be in (0, 1]");
  }
  std::vector<double> w(n_classes, lambda);
  for (const auto &example : targets) {
    for (size_t c : example) {
      if (c >= n_classes) {
        throw Error(ErrorCode::kShapeMismatch,
                    fmt::format("class {} outside {} outputs", c, n_classes));
      }
      w[c] = 1.0;
    }
  }
  return w;
}

template <class T>
T ClassifierLoss(const Parameters<T> &params, const ModelConfig &config,
                 const std::vector<EncodedSequence> &batch,
                 const std::vector<std::vector<size_t>> &targets,
                 const std::vector<double> &class_weights, Parameters<T> *grads) {
  CheckShapes(params, config);
  const Index K = static_cast<Index>(config.n_entities);
  if (batch.empty() || targets.size() != batch.size() ||
      class_weights.size() != config.n_entities) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("batch of {} with {} target rows and {} class weights",
                            batch.size(), targets.size(), class_weights.size()));
  }
  const T denom = T(batch.size()) * T(K);
  double loss = 0;
  for (size_t b = 0; b < batch.size(); ++b) {
    const Gathered in = Gather(batch[b], config);
    EncoderCache<T> cache;
    Mat<T> hidden = Encode<T>(params, config, in, grads ? &cache : nullptr);
    Mat<T> pooled = Pool<T>(hidden, config.pooling);
    Mat<T> logits = pooled * params.head_w.transpose() + params.head_b;
    Mat<T> y = Mat<T>::Zero(1, K);
    for (size_t c : targets[b]) {
      if (c >= config.n_entities) {
        throw Error(ErrorCode::kShapeMismatch,
                    fmt::format("target class {} outside {} outputs", c, K));
      }
      y(0, static_cast<Index>(c)) = T(1);
    }
    Mat<T> dz(1, K);
    for (Index c = 0; c < K; ++c) {
      const T z = logits(0, c);
      const T w = T(class_weights[c]);
      loss += w * (std::max(z, T(0)) - z * y(0, c) + std::log1p(std::exp(-std::abs(z))));
      dz(0, c) = w * (Sigmoid(z) - y(0, c)) / denom;
    }
    if (grads != nullptr) {
      grads->head_w.noalias() += dz.transpose() * pooled;
      grads->head_b += dz;
      Mat<T> dpooled = dz * params.head_w;
      EncodeBackward<T>(params, config, in, cache,
                        PoolBackward<T>(dpooled, hidden.rows(), config.pooling), grads);
    }
  }
  return T(loss / double(denom));
}

template <class T>
T MlmLoss(const Parameters<T> &params, const ModelConfig &config,
          const std::vector<MaskedSequence> &batch, Parameters<T> *grads,
          size_t *n_masked) {
  CheckShapes(params, config);
  size_t total = 0;
  for (const MaskedSequence &s : batch) total += s.targets.size();
  if (n_masked != nullptr) *n_masked = total;
  if (total == 0) return T(0);
  const Index V = static_cast<Index>(config.vocab_size);
  double loss = 0;
  for (const MaskedSequence &s : batch) {
    if (s.targets.empty()) continue;
    const Gathered in = Gather(s.input, config);
    EncoderCache<T> cache;
    Mat<T> hidden = Encode<T>(params, config, in, grads ? &cache : nullptr);
    Mat<T> dhidden;
    if (grads != nullptr) dhidden = Mat<T>::Zero(hidden.rows(), hidden.cols());
    for (const auto &[position, target] : s.targets) {
      auto it = std::lower_bound(in.positions.begin(), in.positions.end(),
                                 static_cast<int32_t>(position));
      if (it == in.positions.end() || *it != static_cast<int32_t>(position) ||
          target < 0 || target >= V) {
        throw Error(ErrorCode::kShapeMismatch,
                    fmt::format("bad masked target at position {}", position));
      }
      const Index r = it - in.positions.begin();
      Mat<T> logits = hidden.row(r) * params.tok_emb.transpose() + params.mlm_bias;
      const T mx = logits.maxCoeff();
      Mat<T> prob = (logits.array() - mx).exp().matrix();
      const T z = prob.sum();
      loss += double(std::log(z) + mx - logits(0, target));
      if (grads != nullptr) {
        prob /= z;
        prob(0, target) -= T(1);
        prob /= T(total);
        grads->tok_emb.noalias() += prob.transpose() * hidden.row(r);
        grads->mlm_bias += prob;
        dhidden.row(r).noalias() += prob * params.tok_emb;
      }
    }
    if (grads != nullptr) {
      EncodeBackward<T>(params, config, in, cache, std::move(dhidden), grads);
    }
  }
  return T(loss / double(total));
}

#define MEDEX_INSTANTIATE(T)                                                    \
  template struct Parameters<T>;                                                \
  template Parameters<T> InitParameters<T>(const ModelConfig &);                \
  template Mat<T> ForwardLogits<T>(const Parameters<T> &, const ModelConfig &,  \
                                   const std::vector<EncodedSequence> &);       \
  template T ClassifierLoss<T>(const Parameters<T> &, const ModelConfig &,      \
                               const std::vector<EncodedSequence> &,            \
                               const std::vector<std::vector<size_t>> &,        \
                               const std::vector<double> &, Parameters<T> *);   \
  template T MlmLoss<T>(const Parameters<T> &, const ModelConfig &,             \
                        const std::vector<MaskedSequence> &, Parameters<T> *,   \
                        size_t *);

MEDEX_INSTANTIATE(float)
MEDEX_INSTANTIATE(double)

#undef MEDEX_INSTANTIATE

}  // namespace medex
