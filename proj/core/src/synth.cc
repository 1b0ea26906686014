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

#include "urnn/synth.h"

#include <algorithm>
#include <cmath>

namespace urnn {
namespace {

constexpr double kDeg = M_PI / 180.0;
constexpr double kGoalDistance = 40.0;

struct Agent {
  Vec2 pos;
  Vec2 vel;
  Vec2 goal;
  double speed = 1.34;
  double relax = 3.0;
  int follow = -1;  // index of the leader being followed
  double follow_gap = 0.0;
  int group = -1;   // no repulsion between members of the same group
};

Vec2 Unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

Vec2 Normalized(Vec2 v) {
  const double n = v.Norm();
  return n > 1e-12 ? v * (1.0 / n) : Vec2{};
}

double Heading(Vec2 v) { return std::atan2(v.y, v.x); }

class Simulator {
 public:
  Simulator(const SynthOptions& o) : o_(o), dt_(1.0 / (o.fps * o.substeps)) {}

  // Positions of every agent at each of `frames` frames, starting at t=0.
  std::vector<std::vector<Vec2>> Run(std::vector<Agent> agents, size_t frames) const {
    std::vector<std::vector<Vec2>> out(agents.size());
    for (size_t a = 0; a < agents.size(); ++a) out[a].push_back(agents[a].pos);
    for (size_t f = 1; f < frames; ++f) {
      for (size_t s = 0; s < o_.substeps; ++s) Step(agents);
      for (size_t a = 0; a < agents.size(); ++a) out[a].push_back(agents[a].pos);
    }
    return out;
  }

  // State of agents after `seconds` of simulation.
  std::vector<Agent> Advance(std::vector<Agent> agents, double seconds) const {
    const size_t steps = static_cast<size_t>(std::lround(seconds / dt_));
    for (size_t s = 0; s < steps; ++s) Step(agents);
    return agents;
  }

 private:
  void Step(std::vector<Agent>& agents) const {
    std::vector<Vec2> acc(agents.size());
    for (size_t a = 0; a < agents.size(); ++a) {
      const Agent& me = agents[a];
      Vec2 desired;
      if (me.follow >= 0) {
        const Agent& lead = agents[me.follow];
        const Vec2 to = lead.pos - me.pos;
        const double gap_ratio = std::clamp(to.Norm() / me.follow_gap, 0.5, 1.5);
        desired = Normalized(to) * (lead.vel.Norm() * gap_ratio);
      } else {
        desired = Normalized(me.goal - me.pos) * me.speed;
      }
      acc[a] = (desired - me.vel) * (1.0 / me.relax);
      for (size_t b = 0; b < agents.size(); ++b) {
        if (b == a) continue;
        if (me.group >= 0 && me.group == agents[b].group) continue;
        const Vec2 away = me.pos - agents[b].pos;
        const double d = away.Norm();
        if (d < 1e-9 || d > 4.0) continue;
        const double mag = o_.repulsion_strength *
                           std::exp((2.0 * o_.agent_radius - d) / o_.repulsion_range);
        acc[a] += away * (mag / d);
      }
    }
    for (size_t a = 0; a < agents.size(); ++a) {
      Agent& me = agents[a];
      me.vel += acc[a] * dt_;
      const double sp = me.vel.Norm();
      if (sp > o_.max_speed) me.vel = me.vel * (o_.max_speed / sp);
      me.pos += me.vel * dt_;
    }
  }

  const SynthOptions& o_;
  double dt_;
};

double SampleSpeed(Rng& rng, const SynthOptions& o) {
  return std::clamp(rng.Normal(o.speed_mean, o.speed_std), o.min_speed, o.max_speed);
}

double SignedTurn(Rng& rng, const SynthOptions& o) {
  const double t = rng.Uniform(o.min_turn_deg, o.max_turn_deg) * kDeg;
  return rng.Uniform() < 0.5 ? -t : t;
}

// Walker at `pos` heading `heading` whose goal lies `turn` radians off that
// heading.
Agent CurvingWalker(Vec2 pos, double heading, double turn, double speed, double relax) {
  Agent a;
  a.pos = pos;
  a.vel = Unit(heading) * speed;
  a.goal = pos + Unit(heading + turn) * kGoalDistance;
  a.speed = speed;
  a.relax = relax;
  return a;
}

Agent StraightWalker(Vec2 pos, double heading, double speed) {
  Agent a;
  a.pos = pos;
  a.vel = Unit(heading) * speed;
  a.goal = pos + Unit(heading) * kGoalDistance;
  a.speed = speed;
  a.relax = 1.0;
  return a;
}

std::vector<Agent> BuildScenario(SynthScenario scenario, Rng& rng, const SynthOptions& o,
                                 const Simulator& sim) {
  const double window_seconds = static_cast<double>(o.obs_len + o.pred_len - 1) / o.fps;
  std::vector<Agent> agents;
  const double relax = rng.Uniform(o.min_relax_time, o.max_relax_time);
  agents.push_back(CurvingWalker({0, 0}, 0.0, SignedTurn(rng, o), SampleSpeed(rng, o), relax));

  // Where the primary would be, walking alone, around the prediction window.
  const double meet_time = rng.Uniform(0.45, 0.75) * window_seconds;
  const Agent alone = sim.Advance({agents[0]}, meet_time).front();

  switch (scenario) {
    case SynthScenario::kCrossing: {
      const double sp = SampleSpeed(rng, o);
      const double side = rng.Uniform() < 0.5 ? -1.0 : 1.0;
      const double heading = Heading(alone.vel) + side * rng.Uniform(60.0, 120.0) * kDeg;
      const Vec2 start = alone.pos - Unit(heading) * (sp * meet_time);
      agents.push_back(StraightWalker(start, heading, sp));
      break;
    }
    case SynthScenario::kHeadOn: {
      const double sp = SampleSpeed(rng, o);
      const double heading = Heading(alone.vel) + M_PI + rng.Uniform(-10.0, 10.0) * kDeg;
      const Vec2 lateral = Unit(heading + M_PI / 2) * rng.Uniform(-0.5, 0.5);
      const Vec2 start = alone.pos + lateral - Unit(heading) * (sp * meet_time);
      agents.push_back(StraightWalker(start, heading, sp));
      break;
    }
    case SynthScenario::kLeaderFollower: {
      const double gap = rng.Uniform(1.2, 2.5);
      Agent leader = CurvingWalker({gap, 0}, 0.0, SignedTurn(rng, o), agents[0].speed,
                                   rng.Uniform(o.min_relax_time, o.max_relax_time));
      agents.push_back(leader);
      agents[0].follow = 1;
      agents[0].follow_gap = gap;
      break;
    }
    case SynthScenario::kGroup: {
      const size_t companions = 1 + rng.Below(2);
      agents[0].group = 0;
      for (size_t c = 0; c < companions; ++c) {
        const double side = (c == 0 ? 1.0 : -1.0) * rng.Uniform(0.6, 0.9);
        Agent mate = agents[0];
        mate.pos = agents[0].pos + Vec2{0.0, side};
        mate.goal = agents[0].goal + Vec2{0.0, side};
        agents.push_back(mate);
      }
      break;
    }
  }

  const size_t background = rng.Below(o.max_background + 1);
  for (size_t b = 0; b < background; ++b) {
    const Vec2 around = alone.pos + Unit(rng.Uniform(0, 2 * M_PI)) * rng.Uniform(2.0, 8.0);
    agents.push_back(StraightWalker(around, rng.Uniform(0, 2 * M_PI), SampleSpeed(rng, o)));
  }
  return agents;
}

}  // namespace

std::vector<Scene> SynthScenes(size_t n, Rng& rng, const SynthOptions& o) {
  if (o.obs_len < 2 || o.pred_len < 1 || o.substeps == 0 || !(o.fps > 0)) {
    throw Error("synth: invalid horizon options");
  }
  CategorizeOptions cat = o.categorize;
  cat.obs_len = o.obs_len;
  cat.pred_len = o.pred_len;
  const Simulator sim(o);
  const size_t window = o.obs_len + o.pred_len;
  const int64_t frame_stride = static_cast<int64_t>(window) + 10;

  std::vector<Scene> scenes;
  scenes.reserve(n);
  for (size_t k = 0; k < n; ++k) {
    const int64_t scene_id = o.first_scene_id + static_cast<int64_t>(k);
    bool accepted = false;
    for (size_t attempt = 0; attempt < o.max_retries && !accepted; ++attempt) {
      const auto scenario = static_cast<SynthScenario>(rng.Below(4));
      std::vector<Agent> agents = BuildScenario(scenario, rng, o, sim);
      const auto paths = sim.Run(agents, window);

      const double rotation = rng.Uniform(0, 2 * M_PI);
      const Vec2 shift{rng.Uniform(-10, 10), rng.Uniform(-10, 10)};
      Scene scene;
      scene.id = scene_id;
      scene.primary_id = scene_id * 16;
      scene.start_frame = scene_id * frame_stride;
      scene.end_frame = scene.start_frame + static_cast<int64_t>(window) - 1;
      scene.fps = o.fps;
      for (size_t a = 0; a < paths.size(); ++a) {
        Track track{scene.primary_id + static_cast<int64_t>(a), {}};
        for (size_t f = 0; f < window; ++f) {
          const Vec2 p = paths[a][f].Rotated(rotation) + shift;
          track.points.push_back({scene.start_frame + static_cast<int64_t>(f), p.x, p.y});
        }
        scene.tracks.push_back(std::move(track));
      }
      if (Categorize(scene, cat).category == SceneCategory::kInteracting) {
        scenes.push_back(std::move(scene));
        accepted = true;
      }
    }
    if (!accepted) {
      throw Error("synth: no Type III scene after " + std::to_string(o.max_retries) +
                  " attempts for scene " + std::to_string(scene_id));
    }
  }
  return scenes;
}

}  // namespace urnn
