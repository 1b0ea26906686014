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

#ifndef URNN_CONFIG_H_
#define URNN_CONFIG_H_

#include <nlohmann/json.hpp>

#include "urnn/categorize.h"
#include "urnn/model.h"
#include "urnn/synth.h"
#include "urnn/train.h"

namespace urnn {

// JSON views of the configuration structs. ToJson materializes every field;
// Merge overwrites only the keys present and rejects unknown keys or
// ill-typed values with Error.
nlohmann::json ToJson(const GridSpec& grid);
nlohmann::json ToJson(const ModelConfig& config);
nlohmann::json ToJson(const TrainSchedule& schedule);
nlohmann::json ToJson(const KalmanOptions& options);
nlohmann::json ToJson(const CategorizeOptions& options);
nlohmann::json ToJson(const SynthOptions& options);

void Merge(const nlohmann::json& j, GridSpec& grid);
void Merge(const nlohmann::json& j, ModelConfig& config);
void Merge(const nlohmann::json& j, TrainSchedule& schedule);
void Merge(const nlohmann::json& j, KalmanOptions& options);
void Merge(const nlohmann::json& j, CategorizeOptions& options);
void Merge(const nlohmann::json& j, SynthOptions& options);

ModelConfig ModelConfigFromJson(const nlohmann::json& j);

}  // namespace urnn

#endif  // URNN_CONFIG_H_
