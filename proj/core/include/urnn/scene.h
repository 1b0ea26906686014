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

#ifndef URNN_SCENE_H_
#define URNN_SCENE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "urnn/common.h"

namespace urnn {

struct TrackPoint {
  int64_t frame = 0;
  double x = 0.0;
  double y = 0.0;

  Vec2 position() const { return {x, y}; }
  bool operator==(const TrackPoint&) const = default;
};

// Samples of one pedestrian in increasing frame order (meters).
struct Track {
  int64_t ped_id = 0;
  std::vector<TrackPoint> points;

  bool operator==(const Track&) const = default;
};

// One evaluation unit: tracks over the frame window [start_frame, end_frame]
// with a designated primary pedestrian. tracks[0] is the primary.
struct Scene {
  int64_t id = 0;
  int64_t primary_id = 0;
  int64_t start_frame = 0;
  int64_t end_frame = 0;
  double fps = 2.5;
  std::vector<Track> tracks;

  const Track& primary() const { return tracks.front(); }
  // Frame increment between consecutive samples of the primary track.
  int64_t FrameStep() const;
  size_t WindowLength() const;

  bool operator==(const Scene&) const = default;
};

// v_t = x_{t+1} - x_t; requires at least two positions.
std::vector<Vec2> Velocities(std::span<const Vec2> positions);
// Inverse of Velocities given the first position.
std::vector<Vec2> IntegrateVelocities(Vec2 start, std::span<const Vec2> velocities);

std::vector<Vec2> Positions(const Track& track);

// Rigid rotation of every coordinate about `center`; frames and ids kept.
Scene RotateScene(const Scene& scene, double theta, Vec2 center);
Scene TranslateScene(const Scene& scene, Vec2 offset);
// Mean of all track samples.
Vec2 SceneCentroid(const Scene& scene);

// Model-facing, frame-aligned view of a scene. Row 0 is the primary.
// Every row in `positions` has window-length samples: neighbours missing
// frames are carried (last observed position, or the first one before the
// track starts). Neighbours never observed during the observation window
// are kept only in `late` for ground-truth collision checks.
struct PreparedScene {
  int64_t scene_id = 0;
  size_t obs_len = 0;
  size_t pred_len = 0;
  std::vector<int64_t> ped_ids;
  std::vector<std::vector<Vec2>> positions;
  std::vector<std::vector<bool>> observed;

  struct LateNeighbor {
    int64_t ped_id;
    std::vector<Vec2> positions;
    std::vector<bool> observed;
  };
  std::vector<LateNeighbor> late;

  size_t num_peds() const { return positions.size(); }
  size_t window() const { return obs_len + pred_len; }
  std::span<const Vec2> Observed(size_t ped) const {
    return std::span<const Vec2>(positions[ped]).first(obs_len);
  }
  std::span<const Vec2> Future(size_t ped) const {
    return std::span<const Vec2>(positions[ped]).subspan(obs_len, pred_len);
  }
};

// Throws Error when the window does not span obs_len + pred_len frames or
// the primary track is not observed at every frame.
PreparedScene PrepareScene(const Scene& scene, size_t obs_len, size_t pred_len);

// Rotates every position of a prepared scene about `center`.
PreparedScene RotatePrepared(const PreparedScene& scene, double theta, Vec2 center);
Vec2 PreparedCentroid(const PreparedScene& scene);

}  // namespace urnn

#endif  // URNN_SCENE_H_
