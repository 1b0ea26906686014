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

#ifndef URNN_OPTIM_H_
#define URNN_OPTIM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "urnn/graph.h"

namespace urnn {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment buffers aligned with a fixed parameter list.
class AdamState {
 public:
  AdamState(std::span<Parameter* const> params, AdamOptions options);

  const AdamOptions& options() const { return options_; }
  void set_lr(double lr) { options_.lr = lr; }
  int64_t step() const { return step_; }
  const std::vector<Tensor>& first_moments() const { return m_; }
  const std::vector<Tensor>& second_moments() const { return v_; }

 private:
  friend void AdamStep(AdamState&, std::span<Parameter* const>);

  AdamOptions options_;
  int64_t step_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

// Bias-corrected Adam update. Throws if a parameter has no gradient or the
// list does not match the one the state was built for. Gradients are left
// untouched.
void AdamStep(AdamState& state, std::span<Parameter* const> params);

// Scales all gradients so their global L2 norm is at most max_norm and
// returns the applied factor (1 when already within bound).
double ClipGradNorm(std::span<Parameter* const> params, double max_norm);

double GlobalGradNorm(std::span<Parameter* const> params);

}  // namespace urnn

#endif  // URNN_OPTIM_H_
