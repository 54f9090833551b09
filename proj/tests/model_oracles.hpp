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

// Test-only references for the model: a loop-based dense forward pass and
// a central finite-difference gradient check.

#ifndef MEDEX_TESTS_MODEL_ORACLES_HPP_
#define MEDEX_TESTS_MODEL_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "model/transformer.hpp"

namespace medex::testing {

using Dense = std::vector<std::vector<double>>;

inline Dense ToDense(const Mat<double> &m) {
  Dense out(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  }
  return out;
}

inline Dense Affine(const Dense &x, const Mat<double> &w, const Mat<double> &b) {
  Dense y(x.size(), std::vector<double>(w.cols(), 0.0));
  for (size_t i = 0; i < x.size(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      double s = b(0, j);
      for (Eigen::Index k = 0; k < w.rows(); ++k) s += x[i][k] * w(k, j);
      y[i][j] = s;
    }
  }
  return y;
}

inline Dense Norm(const Dense &x, const Mat<double> &g, const Mat<double> &b, double eps) {
  Dense y = x;
  for (size_t i = 0; i < x.size(); ++i) {
    const double n = static_cast<double>(x[i].size());
    double mean = 0;
    for (double v : x[i]) mean += v;
    mean /= n;
    double var = 0;
    for (double v : x[i]) var += (v - mean) * (v - mean);
    var /= n;
    for (size_t j = 0; j < x[i].size(); ++j) {
      y[i][j] = (x[i][j] - mean) / std::sqrt(var + eps) * g(0, j) + b(0, j);
    }
  }
  return y;
}

inline Dense Sum(const Dense &a, const Dense &b) {
  Dense y = a;
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < a[i].size(); ++j) y[i][j] += b[i][j];
  }
  return y;
}

// Logits for one unpadded sequence (positions 0..n-1).
inline std::vector<double> DenseForward(const Parameters<double> &p,
                                        const ModelConfig &c,
                                        const std::vector<int32_t> &ids) {
  const size_t n = ids.size(), d = c.d_model, heads = c.n_heads, dh = d / heads;
  Dense x(n, std::vector<double>(d));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < d; ++j) x[i][j] = p.tok_emb(ids[i], j) + p.pos_emb(i, j);
  }
  Dense h = Norm(x, p.emb_ln_g, p.emb_ln_b, c.layer_norm_eps);
  for (const LayerParams<double> &l : p.layers) {
    Dense q = Affine(h, l.wq, l.bq), k = Affine(h, l.wk, l.bk), v = Affine(h, l.wv, l.bv);
    Dense ctx(n, std::vector<double>(d, 0.0));
    for (size_t hd = 0; hd < heads; ++hd) {
      for (size_t i = 0; i < n; ++i) {
        std::vector<double> s(n);
        for (size_t j = 0; j < n; ++j) {
          double dot = 0;
          for (size_t e = 0; e < dh; ++e) dot += q[i][hd * dh + e] * k[j][hd * dh + e];
          s[j] = dot / std::sqrt(static_cast<double>(dh));
        }
        const double mx = *std::max_element(s.begin(), s.end());
        double z = 0;
        for (double &v_ : s) z += (v_ = std::exp(v_ - mx));
        for (size_t j = 0; j < n; ++j) {
          for (size_t e = 0; e < dh; ++e) ctx[i][hd * dh + e] += s[j] / z * v[j][hd * dh + e];
        }
      }
    }
    Dense h1 = Norm(Sum(h, Affine(ctx, l.wo, l.bo)), l.ln1_g, l.ln1_b, c.layer_norm_eps);
    Dense f = Affine(h1, l.w1, l.b1);
    for (auto &row : f) {
      for (double &u : row) u = 0.5 * u * (1.0 + std::erf(u / std::sqrt(2.0)));
    }
    h = Norm(Sum(h1, Affine(f, l.w2, l.b2)), l.ln2_g, l.ln2_b, c.layer_norm_eps);
  }
  std::vector<double> pooled(d, 0.0);
  for (size_t j = 0; j < d; ++j) {
    if (c.pooling == Pooling::kCls) {
      pooled[j] = h[0][j];
    } else {
      for (size_t i = 0; i < n; ++i) pooled[j] += h[i][j] / static_cast<double>(n);
    }
  }
  std::vector<double> logits(c.n_entities);
  for (size_t k = 0; k < c.n_entities; ++k) {
    double s = p.head_b(0, k);
    for (size_t j = 0; j < d; ++j) s += p.head_w(k, j) * pooled[j];
    logits[k] = s;
  }
  return logits;
}

struct GradCheckResult {
  size_t checked = 0;
  size_t resolved = 0;  // pairs above the zero floor
  double max_rel_error = 0;
  std::string worst;
};

// Central differences over every value of every tensor. Pairs where both
// gradients are below `zero` in magnitude count as agreement: with h=1e-5
// and losses of order one, rounding alone puts ~1e-11 into the difference
// quotient, so smaller gradients (the key bias, which attention softmax
// ignores, is exactly zero) cannot be resolved.
inline GradCheckResult CheckGradients(Parameters<double> *params,
                                      const Parameters<double> &analytic,
                                      const std::function<double()> &loss, double h,
                                      double zero = 1e-9) {
  GradCheckResult r;
  auto p = params->Named();
  auto g = analytic.Named();
  for (size_t t = 0; t < p.size(); ++t) {
    Mat<double> &m = *p[t].second;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double saved = m.data()[i];
      m.data()[i] = saved + h;
      const double up = loss();
      m.data()[i] = saved - h;
      const double down = loss();
      m.data()[i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double a = g[t].second->data()[i];
      ++r.checked;
      const double scale = std::max(std::abs(a), std::abs(numeric));
      if (scale < zero) continue;
      ++r.resolved;
      const double rel = std::abs(a - numeric) / scale;
      if (rel > r.max_rel_error) {
        r.max_rel_error = rel;
        r.worst = p[t].first + "[" + std::to_string(i) + "] analytic " +
                  fmt::format("{:.6e} numeric {:.6e}", a, numeric);
      }
    }
  }
  return r;
}

}  // namespace medex::testing

#endif  // MEDEX_TESTS_MODEL_ORACLES_HPP_
