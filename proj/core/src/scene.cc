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

#include "urnn/scene.h"

#include <map>
#include <string>

namespace urnn {

int64_t Scene::FrameStep() const {
  if (tracks.empty() || tracks.front().points.size() < 2) return 1;
  const auto& pts = tracks.front().points;
  return pts[1].frame - pts[0].frame;
}

size_t Scene::WindowLength() const {
  const int64_t step = FrameStep();
  if (step <= 0 || end_frame < start_frame) return 0;
  return static_cast<size_t>((end_frame - start_frame) / step + 1);
}

std::vector<Vec2> Velocities(std::span<const Vec2> positions) {
  if (positions.size() < 2) throw Error("velocities: need at least two positions");
  std::vector<Vec2> v;
  v.reserve(positions.size() - 1);
  for (size_t t = 0; t + 1 < positions.size(); ++t) v.push_back(positions[t + 1] - positions[t]);
  return v;
}

std::vector<Vec2> IntegrateVelocities(Vec2 start, std::span<const Vec2> velocities) {
  std::vector<Vec2> out{start};
  for (const Vec2& v : velocities) out.push_back(out.back() + v);
  return out;
}

std::vector<Vec2> Positions(const Track& track) {
  std::vector<Vec2> out;
  out.reserve(track.points.size());
  for (const auto& p : track.points) out.push_back(p.position());
  return out;
}

Scene RotateScene(const Scene& scene, double theta, Vec2 center) {
  Scene out = scene;
  if (theta == 0.0) return out;
  for (Track& t : out.tracks) {
    for (TrackPoint& p : t.points) {
      const Vec2 r = center + (p.position() - center).Rotated(theta);
      p.x = r.x;
      p.y = r.y;
    }
  }
  return out;
}

Scene TranslateScene(const Scene& scene, Vec2 offset) {
  Scene out = scene;
  for (Track& t : out.tracks) {
    for (TrackPoint& p : t.points) {
      p.x += offset.x;
      p.y += offset.y;
    }
  }
  return out;
}

Vec2 SceneCentroid(const Scene& scene) {
  Vec2 sum;
  size_t n = 0;
  for (const Track& t : scene.tracks) {
    for (const TrackPoint& p : t.points) {
      sum += p.position();
      ++n;
    }
  }
  return n ? sum * (1.0 / static_cast<double>(n)) : Vec2{};
}

PreparedScene PrepareScene(const Scene& scene, size_t obs_len, size_t pred_len) {
  if (obs_len < 2 || pred_len < 1) throw Error("need obs_len >= 2 and pred_len >= 1");
  if (scene.tracks.empty() || scene.tracks.front().ped_id != scene.primary_id) {
    throw Error("scene " + std::to_string(scene.id) + ": primary track missing");
  }
  const int64_t step = scene.FrameStep();
  const size_t window = obs_len + pred_len;
  if (step <= 0 || scene.WindowLength() != window) {
    throw Error("scene " + std::to_string(scene.id) + " spans " +
                std::to_string(scene.WindowLength()) + " frames, expected " +
                std::to_string(window));
  }

  PreparedScene out;
  out.scene_id = scene.id;
  out.obs_len = obs_len;
  out.pred_len = pred_len;

  for (size_t k = 0; k < scene.tracks.size(); ++k) {
    const Track& track = scene.tracks[k];
    std::vector<Vec2> pos(window);
    std::vector<bool> seen(window, false);
    for (const TrackPoint& p : track.points) {
      const int64_t rel = p.frame - scene.start_frame;
      if (rel < 0 || rel % step != 0) continue;
      const size_t idx = static_cast<size_t>(rel / step);
      if (idx >= window) continue;
      pos[idx] = p.position();
      seen[idx] = true;
    }
    if (k == 0) {
      for (size_t t = 0; t < window; ++t) {
        if (!seen[t]) {
          throw Error("scene " + std::to_string(scene.id) + ": primary pedestrian " +
                      std::to_string(track.ped_id) + " missing frame " +
                      std::to_string(scene.start_frame + static_cast<int64_t>(t) * step));
        }
      }
    }
    size_t first_seen = window;
    for (size_t t = 0; t < window; ++t) {
      if (seen[t]) {
        first_seen = t;
        break;
      }
    }
    if (first_seen == window) continue;
    if (first_seen >= obs_len) {
      out.late.push_back({track.ped_id, std::move(pos), std::move(seen)});
      continue;
    }
    for (size_t t = 0; t < first_seen; ++t) pos[t] = pos[first_seen];
    for (size_t t = first_seen + 1; t < window; ++t) {
      if (!seen[t]) pos[t] = pos[t - 1];
    }
    out.ped_ids.push_back(track.ped_id);
    out.positions.push_back(std::move(pos));
    out.observed.push_back(std::move(seen));
  }
  return out;
}

PreparedScene RotatePrepared(const PreparedScene& scene, double theta, Vec2 center) {
  PreparedScene out = scene;
  auto rotate = [&](std::vector<Vec2>& pts) {
    for (Vec2& p : pts) p = center + (p - center).Rotated(theta);
  };
  for (auto& row : out.positions) rotate(row);
  for (auto& late : out.late) rotate(late.positions);
  return out;
}

Vec2 PreparedCentroid(const PreparedScene& scene) {
  Vec2 sum;
  size_t n = 0;
  for (size_t i = 0; i < scene.num_peds(); ++i) {
    for (size_t t = 0; t < scene.window(); ++t) {
      if (!scene.observed[i][t]) continue;
      sum += scene.positions[i][t];
      ++n;
    }
  }
  return n ? sum * (1.0 / static_cast<double>(n)) : Vec2{};
}

}  // namespace urnn
