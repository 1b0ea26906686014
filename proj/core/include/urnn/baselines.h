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

#ifndef URNN_BASELINES_H_
#define URNN_BASELINES_H_

#include <Eigen/Core>
#include <span>
#include <vector>

#include "urnn/predictor.h"

namespace urnn {

// x_{T+k} = x_T + k * (x_T - x_{T-1}).
std::vector<Vec2> PredictConstantVelocity(std::span<const Vec2> observed, size_t pred_len);

struct KalmanOptions {
  double process_noise = 1e-2;      // m^2 per frame, on every state component
  double observation_noise = 1e-3;  // m^2
};

// Linear Kalman filter on the state (x, y, vx, vy) with a constant-velocity
// transition of one frame per step.
class ConstantVelocityKalman {
 public:
  using State = Eigen::Vector4d;
  using Covariance = Eigen::Matrix4d;

  explicit ConstantVelocityKalman(KalmanOptions options = {});

  void Initialize(Vec2 position, Vec2 velocity);
  void Predict();
  void Update(Vec2 measurement);

  Vec2 position() const { return {state_(0), state_(1)}; }
  Vec2 velocity() const { return {state_(2), state_(3)}; }
  const State& state() const { return state_; }
  const Covariance& covariance() const { return covariance_; }

 private:
  KalmanOptions options_;
  Eigen::Matrix4d transition_;
  Eigen::Matrix4d process_;
  Eigen::Matrix2d observation_;
  State state_ = State::Zero();
  Covariance covariance_ = Covariance::Identity();
};

// Filters the observations, then rolls the motion model forward. When
// `covariances` is given, the covariance after every update is appended.
std::vector<Vec2> PredictKalman(std::span<const Vec2> observed, size_t pred_len,
                                const KalmanOptions& options = {},
                                std::vector<Eigen::Matrix4d>* covariances = nullptr);

class ConstantVelocityPredictor : public Predictor {
 public:
  std::string name() const override { return "Constant velocity"; }
  std::string interaction() const override { return "None"; }
  ScenePrediction Predict(const PreparedScene& scene) override;
};

class KalmanPredictor : public Predictor {
 public:
  explicit KalmanPredictor(KalmanOptions options = {}) : options_(options) {}
  std::string name() const override { return "Kalman filter"; }
  std::string interaction() const override { return "None"; }
  ScenePrediction Predict(const PreparedScene& scene) override;

 private:
  KalmanOptions options_;
};

}  // namespace urnn

#endif  // URNN_BASELINES_H_
