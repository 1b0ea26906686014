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

#include "urnn/categorize.h"

#include <algorithm>
#include <cmath>
#include <map>

namespace urnn {
namespace {

constexpr double kMinSpeed = 1e-3;  // m/frame; slower counts as standing

double Degrees(double rad) { return rad * 180.0 / M_PI; }

// Unsigned angle between two vectors in degrees.
double AngleBetween(Vec2 a, Vec2 b) {
  const double cross = a.x * b.y - a.y * b.x;
  return Degrees(std::abs(std::atan2(cross, a.Dot(b))));
}

bool SeenAt(const PreparedScene& s, size_t ped, size_t t) { return s.observed[ped][t]; }

}  // namespace

std::string CategoryLabel(SceneCategory category) {
  switch (category) {
    case SceneCategory::kStatic:
      return "I";
    case SceneCategory::kLinear:
      return "II";
    case SceneCategory::kInteracting:
      return "III";
    case SceneCategory::kOther:
      return "IV";
  }
  return "?";
}

SceneCategory ParseCategoryLabel(const std::string& label) {
  if (label == "I" || label == "1") return SceneCategory::kStatic;
  if (label == "II" || label == "2") return SceneCategory::kLinear;
  if (label == "III" || label == "3") return SceneCategory::kInteracting;
  if (label == "IV" || label == "4") return SceneCategory::kOther;
  throw ParseError("unknown scene type '" + label + "'");
}

std::string SubtypeLabel(InteractionSubtype subtype) {
  switch (subtype) {
    case InteractionSubtype::kLeaderFollower:
      return "leader_follower";
    case InteractionSubtype::kCollisionAvoidance:
      return "collision_avoidance";
    case InteractionSubtype::kGroup:
      return "group";
    case InteractionSubtype::kOthers:
      return "others";
  }
  return "?";
}

std::string SceneTypeLabel(const SceneType& type) {
  std::string label = CategoryLabel(type.category);
  if (type.subtype) label += "/" + SubtypeLabel(*type.subtype);
  return label;
}

bool IsLeaderFollower(const PreparedScene& s, size_t nb, const CategorizeOptions& o) {
  size_t valid = 0, hits = 0;
  for (size_t t = s.obs_len; t < s.window(); ++t) {
    if (!SeenAt(s, nb, t) || !SeenAt(s, nb, t - 1)) continue;
    const Vec2 vp = s.positions[0][t] - s.positions[0][t - 1];
    const Vec2 vn = s.positions[nb][t] - s.positions[nb][t - 1];
    const double sp = vp.Norm();
    if (sp < kMinSpeed) continue;
    ++valid;
    const Vec2 offset = s.positions[nb][t] - s.positions[0][t];
    const double dist = offset.Norm();
    if (dist <= 0.0 || dist > o.leader_distance) continue;
    if (AngleBetween(vp, offset) > o.leader_angle_deg) continue;
    const double ratio = vn.Norm() / sp;
    if (ratio < o.speed_ratio_min || ratio > o.speed_ratio_max) continue;
    ++hits;
  }
  return valid > 0 && 2 * hits >= valid;
}

bool IsCollisionAvoidance(const PreparedScene& s, size_t nb, const CategorizeOptions& o) {
  const size_t last = s.obs_len - 1;
  if (!SeenAt(s, nb, last) || !SeenAt(s, nb, last - 1)) return false;
  const Vec2 pp = s.positions[0][last];
  const Vec2 pn = s.positions[nb][last];
  const Vec2 vp = pp - s.positions[0][last - 1];
  const Vec2 vn = pn - s.positions[nb][last - 1];
  for (size_t k = 0; k <= s.pred_len; ++k) {
    const double kd = static_cast<double>(k);
    if (Distance(pp + vp * kd, pn + vn * kd) < o.collision_distance) return true;
  }
  return false;
}

bool IsGroup(const PreparedScene& s, size_t nb, const CategorizeOptions& o) {
  double dist_sum = 0.0;
  size_t n = 0;
  size_t first = 0, lastseen = 0;
  for (size_t t = s.obs_len; t < s.window(); ++t) {
    if (!SeenAt(s, nb, t)) continue;
    if (n == 0) first = t;
    lastseen = t;
    dist_sum += Distance(s.positions[0][t], s.positions[nb][t]);
    ++n;
  }
  if (n < 2 || dist_sum / static_cast<double>(n) >= o.group_distance) return false;
  const Vec2 dp = s.positions[0][lastseen] - s.positions[0][first];
  const Vec2 dn = s.positions[nb][lastseen] - s.positions[nb][first];
  if (dp.Norm() < kMinSpeed || dn.Norm() < kMinSpeed) return false;
  return AngleBetween(dp, dn) < o.group_angle_deg;
}

bool IsNearby(const PreparedScene& s, size_t nb, const CategorizeOptions& o) {
  for (size_t t = s.obs_len; t < s.window(); ++t) {
    if (SeenAt(s, nb, t) && Distance(s.positions[0][t], s.positions[nb][t]) < o.interaction_distance) {
      return true;
    }
  }
  return false;
}

SceneType Categorize(const PreparedScene& s, const CategorizeOptions& o) {
  const std::vector<Vec2>& primary = s.positions[0];
  if (Distance(primary.front(), primary.back()) < o.static_threshold) {
    return {SceneCategory::kStatic, std::nullopt};
  }
  const std::vector<Vec2> kf = PredictKalman(s.Observed(0), s.pred_len, o.kalman);
  if (Distance(kf.back(), primary.back()) < o.kalman_threshold) {
    return {SceneCategory::kLinear, std::nullopt};
  }
  using Predicate = bool (*)(const PreparedScene&, size_t, const CategorizeOptions&);
  const std::pair<InteractionSubtype, Predicate> cascade[] = {
      {InteractionSubtype::kLeaderFollower, &IsLeaderFollower},
      {InteractionSubtype::kCollisionAvoidance, &IsCollisionAvoidance},
      {InteractionSubtype::kGroup, &IsGroup},
      {InteractionSubtype::kOthers, &IsNearby},
  };
  for (const auto& [subtype, predicate] : cascade) {
    for (size_t nb = 1; nb < s.num_peds(); ++nb) {
      if (predicate(s, nb, o)) return {SceneCategory::kInteracting, subtype};
    }
  }
  return {SceneCategory::kOther, std::nullopt};
}

SceneType Categorize(const Scene& scene, const CategorizeOptions& options) {
  return Categorize(PrepareScene(scene, options.obs_len, options.pred_len), options);
}

SceneSplit SplitScenes(std::span<const Scene> scenes, const SplitRatios& ratios, uint64_t seed,
                       const CategorizeOptions& options) {
  const double total = ratios.train + ratios.val + ratios.test;
  if (!(total > 0) || ratios.train < 0 || ratios.val < 0 || ratios.test < 0) {
    throw Error("split ratios must be non-negative with a positive sum");
  }
  const double share[3] = {ratios.train / total, ratios.val / total, ratios.test / total};

  std::map<std::string, std::vector<size_t>> strata;
  for (size_t i = 0; i < scenes.size(); ++i) {
    strata[SceneTypeLabel(Categorize(scenes[i], options))].push_back(i);
  }

  Rng rng(seed);
  SceneSplit out;
  std::vector<Scene>* dest[3] = {&out.train, &out.val, &out.test};
  for (auto& [label, members] : strata) {
    rng.Shuffle(members);
    const size_t n = members.size();
    size_t counts[3];
    double frac[3];
    size_t assigned = 0;
    for (int k = 0; k < 3; ++k) {
      const double exact = share[k] * static_cast<double>(n);
      counts[k] = static_cast<size_t>(std::floor(exact));
      frac[k] = exact - static_cast<double>(counts[k]);
      assigned += counts[k];
    }
    // Largest remainder; ties favour train, then val.
    while (assigned < n) {
      int best = 0;
      for (int k = 1; k < 3; ++k) {
        if (frac[k] > frac[best]) best = k;
      }
      ++counts[best];
      frac[best] = -1.0;
      ++assigned;
    }
    size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
      for (size_t c = 0; c < counts[k]; ++c) dest[k]->push_back(scenes[members[pos++]]);
    }
  }
  return out;
}

}  // namespace urnn
