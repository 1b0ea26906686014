// Copyright 2026 The URNN Authors
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

#include "urnn/optim.h"

#include <cmath>

namespace urnn {

AdamState::AdamState(std::span<Parameter* const> params, AdamOptions options)
    : options_(options) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Parameter* p : params) {
    m_.push_back(Tensor::Zeros(p->value.shape()));
    v_.push_back(Tensor::Zeros(p->value.shape()));
  }
}

void AdamStep(AdamState& state, std::span<Parameter* const> params) {
  if (params.size() != state.m_.size()) {
    throw Error("adam: parameter list does not match optimizer state");
  }
  for (size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->grad) throw Error("adam: missing gradient for " + params[i]->name);
    if (params[i]->value.shape() != state.m_[i].shape()) {
      throw ShapeError("adam: moment shape mismatch for " + params[i]->name);
    }
  }
  ++state.step_;
  const AdamOptions& o = state.options_;
  const double t = static_cast<double>(state.step_);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor& w = params[i]->value;
    const Tensor& g = *params[i]->grad;
    Tensor& m = state.m_[i];
    Tensor& v = state.v_[i];
    for (size_t k = 0; k < w.size(); ++k) {
      const double gk = g[k];
      m[k] = static_cast<Scalar>(o.beta1 * m[k] + (1.0 - o.beta1) * gk);
      v[k] = static_cast<Scalar>(o.beta2 * v[k] + (1.0 - o.beta2) * gk * gk);
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      w[k] = static_cast<Scalar>(w[k] - o.lr * m_hat / (std::sqrt(v_hat) + o.eps));
    }
  }
}

double GlobalGradNorm(std::span<Parameter* const> params) {
  double sq = 0.0;
  for (const Parameter* p : params) {
    if (!p->grad) continue;
    for (Scalar g : p->grad->data()) sq += static_cast<double>(g) * g;
  }
  return std::sqrt(sq);
}

double ClipGradNorm(std::span<Parameter* const> params, double max_norm) {
  if (!(max_norm > 0.0)) throw Error("clip_grad_norm: max_norm must be positive");
  const double norm = GlobalGradNorm(params);
  if (norm <= max_norm) return 1.0;
  const double factor = max_norm / norm;
  for (Parameter* p : params) {
    if (!p->grad) continue;
    for (Scalar& g : p->grad->data()) g = static_cast<Scalar>(g * factor);
  }
  return factor;
}

}  // namespace urnn
