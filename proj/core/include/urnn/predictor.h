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

#ifndef URNN_PREDICTOR_H_
#define URNN_PREDICTOR_H_

#include <span>
#include <string>
#include <vector>

#include "urnn/scene.h"

namespace urnn {

// Predicted future positions for every modelled pedestrian of a prepared
// scene, in the same row order; each row has pred_len points.
struct ScenePrediction {
  std::vector<std::vector<Vec2>> positions;
};

// Anything that forecasts a scene: trained models and learning-free
// baselines alike.
class Predictor {
 public:
  virtual ~Predictor() = default;

  // Table label, e.g. "U-LSTM - LSTM" or "Kalman filter".
  virtual std::string name() const = 0;
  // Interaction module label, "None" for baselines.
  virtual std::string interaction() const = 0;

  virtual ScenePrediction Predict(const PreparedScene& scene) = 0;
  virtual std::vector<ScenePrediction> PredictBatch(std::span<const PreparedScene> scenes) {
    std::vector<ScenePrediction> out;
    out.reserve(scenes.size());
    for (const auto& s : scenes) out.push_back(Predict(s));
    return out;
  }
};

}  // namespace urnn

#endif  // URNN_PREDICTOR_H_
