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

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "testing/oracles.h"
#include "urnn/metrics.h"

namespace urnn {
namespace {

std::vector<Vec2> Line(Vec2 start, Vec2 step, size_t n) {
  std::vector<Vec2> out;
  for (size_t k = 0; k < n; ++k) out.push_back(start + step * static_cast<double>(k));
  return out;
}

TEST(ConstantVelocityTest, StraightLineContinuation) {
  const Vec2 obs[] = {{4, 0}, {5, 0}};
  const auto pred = PredictConstantVelocity(obs, 12);
  ASSERT_EQ(pred.size(), 12u);
  EXPECT_EQ(pred.front(), (Vec2{6, 0}));
  EXPECT_EQ(pred.back(), (Vec2{17, 0}));
}

TEST(ConstantVelocityTest, ZeroVelocityFreezes) {
  const Vec2 obs[] = {{1, 2}, {3, 3}, {3, 3}};
  for (const Vec2& p : PredictConstantVelocity(obs, 5)) EXPECT_EQ(p, (Vec2{3, 3}));
  const Vec2 one[] = {{1, 2}};
  EXPECT_THROW(PredictConstantVelocity(one, 5), Error);
}

TEST(ConstantVelocityTest, ExactOnDyadicLines) {
  Rng rng(1);
  for (int draw = 0; draw < 200; ++draw) {
    const Vec2 start{std::ldexp(std::floor(rng.Uniform(-512, 512)), -4),
                     std::ldexp(std::floor(rng.Uniform(-512, 512)), -4)};
    const Vec2 step{std::ldexp(std::floor(rng.Uniform(-64, 64)), -6),
                    std::ldexp(std::floor(rng.Uniform(-64, 64)), -6)};
    const auto all = Line(start, step, 21);
    const auto pred = PredictConstantVelocity(std::span(all).first(9), 12);
    for (size_t k = 0; k < 12; ++k) EXPECT_EQ(pred[k], all[9 + k]);
    EXPECT_EQ(Ade(pred, std::span(all).subspan(9)), 0.0);
  }
}

TEST(ConstantVelocityTest, RotationAndTranslationEquivariant) {
  Rng rng(2);
  for (int draw = 0; draw < 50; ++draw) {
    std::vector<Vec2> obs;
    for (int t = 0; t < 9; ++t) obs.push_back({rng.Uniform(-3, 3), rng.Uniform(-3, 3)});
    const auto base = PredictConstantVelocity(obs, 12);
    // Quarter turn is exact in floating point.
    std::vector<Vec2> rot;
    for (const Vec2& p : obs) rot.push_back({-p.y, p.x});
    const auto rpred = PredictConstantVelocity(rot, 12);
    for (size_t k = 0; k < 12; ++k) EXPECT_EQ(rpred[k], (Vec2{-base[k].y, base[k].x}));
    const double theta = rng.Uniform(0, 2 * M_PI);
    std::vector<Vec2> generic;
    for (const Vec2& p : obs) generic.push_back(p.Rotated(theta));
    const auto gpred = PredictConstantVelocity(generic, 12);
    for (size_t k = 0; k < 12; ++k) EXPECT_LT(Distance(gpred[k], base[k].Rotated(theta)), 1e-12);
  }
}

TEST(KalmanTest, NoiselessConstantVelocityTrack) {
  Rng rng(3);
  for (int draw = 0; draw < 100; ++draw) {
    const Vec2 start{rng.Uniform(-10, 10), rng.Uniform(-10, 10)};
    const Vec2 step{rng.Uniform(-0.8, 0.8), rng.Uniform(-0.8, 0.8)};
    const auto all = Line(start, step, 21);
    const auto pred = PredictKalman(std::span(all).first(9), 12);
    EXPECT_LT(Fde(pred, std::span(all).subspan(9)), 1e-6);
  }
}

TEST(KalmanTest, LateTurnIsSmoothedBetweenHeadings) {
  std::vector<Vec2> track = Line({0, 0}, {0.5, 0}, 7);
  for (int k = 1; k <= 14; ++k) track.push_back(track[6] + Vec2{0, 0.5 * k});
  const auto obs = std::span<const Vec2>(track).first(9);
  const auto truth = std::span<const Vec2>(track).subspan(9);
  const auto kalman = PredictKalman(obs, 12);
  const auto cv = PredictConstantVelocity(obs, 12);
  const Vec2 heading = kalman.back() - obs.back();
  EXPECT_GT(heading.x, 0);
  EXPECT_GT(heading.y, 0);
  EXPECT_GT(Fde(kalman, truth), Fde(cv, truth));
}

TEST(KalmanTest, CovarianceStaysSymmetricPsd) {
  Rng rng(4);
  for (int draw = 0; draw < 50; ++draw) {
    std::vector<Vec2> obs;
    for (int t = 0; t < 9; ++t) obs.push_back({0.4 * t + rng.Uniform(-0.2, 0.2), rng.Uniform(-1, 1)});
    std::vector<Eigen::Matrix4d> covs;
    PredictKalman(obs, 12, {}, &covs);
    ASSERT_GE(covs.size(), 8u);
    for (const auto& p : covs) {
      EXPECT_LT((p - p.transpose()).cwiseAbs().maxCoeff(), 1e-12);
      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(p);
      EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
    }
  }
}

TEST(KalmanTest, RotationAndTranslationEquivariant) {
  Rng rng(5);
  for (int draw = 0; draw < 50; ++draw) {
    std::vector<Vec2> obs;
    for (int t = 0; t < 9; ++t) obs.push_back({0.4 * t + rng.Uniform(-0.3, 0.3), rng.Uniform(-1, 1)});
    const auto base = PredictKalman(obs, 12);
    const double theta = rng.Uniform(0, 2 * M_PI);
    const Vec2 shift{rng.Uniform(-20, 20), rng.Uniform(-20, 20)};
    std::vector<Vec2> moved;
    for (const Vec2& p : obs) moved.push_back(p.Rotated(theta) + shift);
    const auto pred = PredictKalman(moved, 12);
    for (size_t k = 0; k < 12; ++k) {
      EXPECT_LT(Distance(pred[k], base[k].Rotated(theta) + shift), 1e-9);
    }
  }
}

TEST(KalmanTest, NonFiniteInputRejected) {
  const Vec2 obs[] = {{0, 0}, {NAN, 1}, {2, 2}};
  EXPECT_THROW(PredictKalman(obs, 3), Error);
}

TEST(BaselinePredictorTest, PredictsEveryRow) {
  const Scene s = testing::MakeScene(1, {testing::LineTrack(1, 0, 21, {0, 0}, {0.5, 0}),
                                         testing::LineTrack(2, 0, 21, {0, 2}, {0, -0.25})});
  const PreparedScene p = PrepareScene(s, 9, 12);
  ConstantVelocityPredictor cv;
  KalmanPredictor kf;
  for (Predictor* pred : std::initializer_list<Predictor*>{&cv, &kf}) {
    const ScenePrediction out = pred->Predict(p);
    ASSERT_EQ(out.positions.size(), 2u);
    for (size_t r = 0; r < 2; ++r) {
      ASSERT_EQ(out.positions[r].size(), 12u);
      EXPECT_LT(Fde(out.positions[r], p.Future(r)), 1e-6) << pred->name();
    }
    EXPECT_EQ(pred->interaction(), "None");
  }
  EXPECT_EQ(cv.name(), "Constant velocity");
  EXPECT_EQ(kf.name(), "Kalman filter");
}

}  // namespace
}  // namespace urnn
