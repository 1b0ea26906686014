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

#ifndef URNN_SYNTH_H_
#define URNN_SYNTH_H_

#include <vector>

#include "urnn/categorize.h"
#include "urnn/scene.h"

namespace urnn {

enum class SynthScenario { kCrossing, kHeadOn, kLeaderFollower, kGroup };

struct SynthOptions {
  size_t obs_len = 9;
  size_t pred_len = 12;
  double fps = 2.5;
  size_t substeps = 4;  // integration steps per frame
  double speed_mean = 1.34;
  double speed_std = 0.26;
  double min_speed = 0.6;
  double max_speed = 2.0;
  // Goal direction offset from the initial heading (degrees); agents relax
  // towards it over relax_time seconds, which bends their paths.
  double min_turn_deg = 30.0;
  double max_turn_deg = 90.0;
  double min_relax_time = 2.5;
  double max_relax_time = 6.0;
  // Pairwise exponential repulsion a * exp((2r - d) / b).
  double repulsion_strength = 2.0;
  double repulsion_range = 0.3;
  double agent_radius = 0.25;
  size_t max_background = 2;
  size_t max_retries = 500;
  int64_t first_scene_id = 0;
  CategorizeOptions categorize;
};

// Goal-directed agents with simple collision-avoidance steering, sampled
// among crossing / head-on / leader-follower / group scenarios. Every
// returned scene categorizes as Type III under options.categorize; throws
// when no valid scene is found within max_retries attempts.
std::vector<Scene> SynthScenes(size_t n, Rng& rng, const SynthOptions& options = {});

}  // namespace urnn

#endif  // URNN_SYNTH_H_
