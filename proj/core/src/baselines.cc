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

#include "urnn/baselines.h"

#include <Eigen/Dense>
#include <cmath>

namespace urnn {
namespace {

void RequireUsable(std::span<const Vec2> observed, const char* who) {
  if (observed.size() < 2) throw Error(std::string(who) + ": need at least two observations");
  for (const Vec2& p : observed) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw NumericalError(std::string(who) + ": non-finite observation");
    }
  }
}

}  // namespace

std::vector<Vec2> PredictConstantVelocity(std::span<const Vec2> observed, size_t pred_len) {
  RequireUsable(observed, "constant velocity");
  const Vec2 last = observed.back();
  const Vec2 vel = last - observed[observed.size() - 2];
  std::vector<Vec2> out;
  out.reserve(pred_len);
  for (size_t k = 1; k <= pred_len; ++k) out.push_back(last + vel * static_cast<double>(k));
  return out;
}

ConstantVelocityKalman::ConstantVelocityKalman(KalmanOptions options) : options_(options) {
  transition_ = Eigen::Matrix4d::Identity();
  transition_(0, 2) = 1.0;
  transition_(1, 3) = 1.0;
  process_ = Eigen::Matrix4d::Identity() * options_.process_noise;
  observation_ = Eigen::Matrix2d::Identity() * options_.observation_noise;
}

void ConstantVelocityKalman::Initialize(Vec2 position, Vec2 velocity) {
  state_ << position.x, position.y, velocity.x, velocity.y;
  covariance_ = Covariance::Zero();
  covariance_.diagonal() << options_.observation_noise, options_.observation_noise,
      2.0 * options_.observation_noise, 2.0 * options_.observation_noise;
}

void ConstantVelocityKalman::Predict() {
  state_ = transition_ * state_;
  covariance_ = transition_ * covariance_ * transition_.transpose() + process_;
  covariance_ = 0.5 * (covariance_ + covariance_.transpose());
}

void ConstantVelocityKalman::Update(Vec2 measurement) {
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  const Eigen::Vector2d z(measurement.x, measurement.y);
  const Eigen::Vector2d innovation = z - h * state_;
  const Eigen::Matrix2d s = h * covariance_ * h.transpose() + observation_;
  const Eigen::Matrix<double, 4, 2> gain = covariance_ * h.transpose() * s.inverse();
  state_ += gain * innovation;
  // Joseph form keeps the covariance symmetric positive semi-definite.
  const Eigen::Matrix4d a = Eigen::Matrix4d::Identity() - gain * h;
  covariance_ = a * covariance_ * a.transpose() + gain * observation_ * gain.transpose();
  covariance_ = 0.5 * (covariance_ + covariance_.transpose());
}

std::vector<Vec2> PredictKalman(std::span<const Vec2> observed, size_t pred_len,
                                const KalmanOptions& options,
                                std::vector<Eigen::Matrix4d>* covariances) {
  RequireUsable(observed, "kalman");
  ConstantVelocityKalman kf(options);
  kf.Initialize(observed[0], observed[1] - observed[0]);
  for (size_t t = 1; t < observed.size(); ++t) {
    kf.Predict();
    kf.Update(observed[t]);
    if (covariances) covariances->push_back(kf.covariance());
  }
  std::vector<Vec2> out;
  out.reserve(pred_len);
  for (size_t k = 0; k < pred_len; ++k) {
    kf.Predict();
    out.push_back(kf.position());
  }
  return out;
}

ScenePrediction ConstantVelocityPredictor::Predict(const PreparedScene& scene) {
  ScenePrediction out;
  for (size_t i = 0; i < scene.num_peds(); ++i) {
    out.positions.push_back(PredictConstantVelocity(scene.Observed(i), scene.pred_len));
  }
  return out;
}

ScenePrediction KalmanPredictor::Predict(const PreparedScene& scene) {
  ScenePrediction out;
  for (size_t i = 0; i < scene.num_peds(); ++i) {
    out.positions.push_back(PredictKalman(scene.Observed(i), scene.pred_len, options_));
  }
  return out;
}

}  // namespace urnn
