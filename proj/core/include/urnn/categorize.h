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

#ifndef URNN_CATEGORIZE_H_
#define URNN_CATEGORIZE_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urnn/baselines.h"
#include "urnn/scene.h"

namespace urnn {

enum class SceneCategory { kStatic = 1, kLinear = 2, kInteracting = 3, kOther = 4 };
enum class InteractionSubtype {
  kLeaderFollower = 1,
  kCollisionAvoidance = 2,
  kGroup = 3,
  kOthers = 4,
};

struct SceneType {
  SceneCategory category = SceneCategory::kOther;
  std::optional<InteractionSubtype> subtype;  // set iff category is kInteracting

  bool operator==(const SceneType&) const = default;
};

// "I", "II", "III", "IV".
std::string CategoryLabel(SceneCategory category);
SceneCategory ParseCategoryLabel(const std::string& label);
// "leader_follower", "collision_avoidance", "group", "others".
std::string SubtypeLabel(InteractionSubtype subtype);
// Category label, with "/<subtype>" appended for Type III.
std::string SceneTypeLabel(const SceneType& type);

// Decision thresholds. Distances in meters, angles in degrees.
struct CategorizeOptions {
  size_t obs_len = 9;
  size_t pred_len = 12;
  double static_threshold = 1.0;
  double kalman_threshold = 0.5;
  double collision_distance = 0.3;
  double leader_distance = 5.0;
  double leader_angle_deg = 15.0;
  double speed_ratio_min = 0.8;
  double speed_ratio_max = 1.25;
  double group_distance = 0.8;
  double group_angle_deg = 15.0;
  double interaction_distance = 2.0;
  KalmanOptions kalman;
};

// Interaction predicates, each evaluated for one neighbour over the
// prediction window of a prepared scene (primary is row 0).
bool IsLeaderFollower(const PreparedScene& scene, size_t neighbor, const CategorizeOptions& o);
bool IsCollisionAvoidance(const PreparedScene& scene, size_t neighbor, const CategorizeOptions& o);
bool IsGroup(const PreparedScene& scene, size_t neighbor, const CategorizeOptions& o);
bool IsNearby(const PreparedScene& scene, size_t neighbor, const CategorizeOptions& o);

// Cascade: static -> linear (Kalman FDE) -> interacting (subtypes in the
// fixed priority leader-follower, collision avoidance, group, others) ->
// other.
SceneType Categorize(const PreparedScene& scene, const CategorizeOptions& options = {});
SceneType Categorize(const Scene& scene, const CategorizeOptions& options = {});

struct SplitRatios {
  double train = 0.8;
  double val = 0.2;
  double test = 0.0;
};

struct SceneSplit {
  std::vector<Scene> train;
  std::vector<Scene> val;
  std::vector<Scene> test;
};

// Seeded split stratified by scene type label; the splits are disjoint and
// their union is the input.
SceneSplit SplitScenes(std::span<const Scene> scenes, const SplitRatios& ratios, uint64_t seed,
                       const CategorizeOptions& options = {});

}  // namespace urnn

#endif  // URNN_CATEGORIZE_H_
