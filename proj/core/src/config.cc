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

#include "urnn/config.h"

#include <functional>
#include <map>

namespace urnn {
namespace {

using nlohmann::json;

// Applies a handler per known key; any other key is an error.
class Merger {
 public:
  Merger(const json& j, std::string section) : j_(j), section_(std::move(section)) {
    if (!j.is_object()) throw Error("config: '" + section_ + "' must be an object");
  }

  template <typename T>
  Merger& Field(const std::string& key, T& target) {
    handlers_[key] = [this, key, &target](const json& v) {
      try {
        target = v.get<T>();
      } catch (const json::exception& e) {
        throw Error("config: bad value for " + section_ + "." + key + ": " + e.what());
      }
    };
    return *this;
  }

  Merger& Custom(const std::string& key, std::function<void(const json&)> fn) {
    handlers_[key] = [this, key, fn = std::move(fn)](const json& v) {
      try {
        fn(v);
      } catch (const json::exception& e) {
        throw Error("config: bad value for " + section_ + "." + key + ": " + e.what());
      }
    };
    return *this;
  }

  void Apply() const {
    for (const auto& [key, value] : j_.items()) {
      auto it = handlers_.find(key);
      if (it == handlers_.end()) throw Error("config: unknown key " + section_ + "." + key);
      it->second(value);
    }
  }

 private:
  const json& j_;
  std::string section_;
  std::map<std::string, std::function<void(const json&)>> handlers_;
};

template <typename Enum, typename Parse>
std::function<void(const json&)> EnumField(Enum& target, Parse parse) {
  return [&target, parse](const json& v) { target = parse(v.get<std::string>()); };
}

}  // namespace

json ToJson(const GridSpec& g) {
  return {{"n_cells", g.n_cells},
          {"cell_side", g.cell_side},
          {"ego_aligned", g.ego_aligned},
          {"relative_velocity", g.relative_velocity}};
}

json ToJson(const ModelConfig& c) {
  return {{"cell", ToString(c.cell)},       {"encoder", ToString(c.encoder)},
          {"pooling", ToString(c.pooling)}, {"e_dim", c.e_dim},
          {"hidden_dim", c.hidden_dim},     {"pool_dim", c.pool_dim},
          {"grid", ToJson(c.grid)},         {"loss", ToString(c.loss)},
          {"obs_len", c.obs_len},           {"pred_len", c.pred_len}};
}

json ToJson(const TrainSchedule& s) {
  return {{"max_epochs", s.max_epochs},
          {"lr", s.lr},
          {"plateau_patience", s.plateau_patience},
          {"decay_factor", s.decay_factor},
          {"early_stop_patience", s.early_stop_patience},
          {"batch_size", s.batch_size},
          {"augment", s.augment},
          {"seed", s.seed},
          {"clip_norm", s.clip_norm},
          {"jobs", s.jobs},
          {"deterministic", s.deterministic},
          {"restore_best", s.restore_best}};
}

json ToJson(const KalmanOptions& k) {
  return {{"process_noise", k.process_noise}, {"observation_noise", k.observation_noise}};
}

json ToJson(const CategorizeOptions& o) {
  return {{"obs_len", o.obs_len},
          {"pred_len", o.pred_len},
          {"static_threshold", o.static_threshold},
          {"kalman_threshold", o.kalman_threshold},
          {"collision_distance", o.collision_distance},
          {"leader_distance", o.leader_distance},
          {"leader_angle_deg", o.leader_angle_deg},
          {"speed_ratio_min", o.speed_ratio_min},
          {"speed_ratio_max", o.speed_ratio_max},
          {"group_distance", o.group_distance},
          {"group_angle_deg", o.group_angle_deg},
          {"interaction_distance", o.interaction_distance},
          {"kalman", ToJson(o.kalman)}};
}

json ToJson(const SynthOptions& o) {
  return {{"obs_len", o.obs_len},
          {"pred_len", o.pred_len},
          {"fps", o.fps},
          {"substeps", o.substeps},
          {"speed_mean", o.speed_mean},
          {"speed_std", o.speed_std},
          {"min_speed", o.min_speed},
          {"max_speed", o.max_speed},
          {"min_turn_deg", o.min_turn_deg},
          {"max_turn_deg", o.max_turn_deg},
          {"min_relax_time", o.min_relax_time},
          {"max_relax_time", o.max_relax_time},
          {"repulsion_strength", o.repulsion_strength},
          {"repulsion_range", o.repulsion_range},
          {"agent_radius", o.agent_radius},
          {"max_background", o.max_background},
          {"max_retries", o.max_retries},
          {"first_scene_id", o.first_scene_id}};
}

void Merge(const json& j, GridSpec& g) {
  Merger(j, "grid")
      .Field("n_cells", g.n_cells)
      .Field("cell_side", g.cell_side)
      .Field("ego_aligned", g.ego_aligned)
      .Field("relative_velocity", g.relative_velocity)
      .Apply();
}

void Merge(const json& j, ModelConfig& c) {
  Merger(j, "model")
      .Custom("cell", EnumField(c.cell, ParseCellKind))
      .Custom("encoder", EnumField(c.encoder, ParseEncoderVariant))
      .Custom("pooling", EnumField(c.pooling, ParsePoolingKind))
      .Field("e_dim", c.e_dim)
      .Field("hidden_dim", c.hidden_dim)
      .Field("pool_dim", c.pool_dim)
      .Custom("grid", [&c](const json& v) { Merge(v, c.grid); })
      .Custom("loss", EnumField(c.loss, ParseLossKind))
      .Field("obs_len", c.obs_len)
      .Field("pred_len", c.pred_len)
      .Apply();
}

void Merge(const json& j, TrainSchedule& s) {
  Merger(j, "train")
      .Field("max_epochs", s.max_epochs)
      .Field("lr", s.lr)
      .Field("plateau_patience", s.plateau_patience)
      .Field("decay_factor", s.decay_factor)
      .Field("early_stop_patience", s.early_stop_patience)
      .Field("batch_size", s.batch_size)
      .Field("augment", s.augment)
      .Field("seed", s.seed)
      .Field("clip_norm", s.clip_norm)
      .Field("jobs", s.jobs)
      .Field("deterministic", s.deterministic)
      .Field("restore_best", s.restore_best)
      .Apply();
}

void Merge(const json& j, KalmanOptions& k) {
  Merger(j, "kalman")
      .Field("process_noise", k.process_noise)
      .Field("observation_noise", k.observation_noise)
      .Apply();
}

void Merge(const json& j, CategorizeOptions& o) {
  Merger(j, "categorize")
      .Field("obs_len", o.obs_len)
      .Field("pred_len", o.pred_len)
      .Field("static_threshold", o.static_threshold)
      .Field("kalman_threshold", o.kalman_threshold)
      .Field("collision_distance", o.collision_distance)
      .Field("leader_distance", o.leader_distance)
      .Field("leader_angle_deg", o.leader_angle_deg)
      .Field("speed_ratio_min", o.speed_ratio_min)
      .Field("speed_ratio_max", o.speed_ratio_max)
      .Field("group_distance", o.group_distance)
      .Field("group_angle_deg", o.group_angle_deg)
      .Field("interaction_distance", o.interaction_distance)
      .Custom("kalman", [&o](const json& v) { Merge(v, o.kalman); })
      .Apply();
}

void Merge(const json& j, SynthOptions& o) {
  Merger(j, "synth")
      .Field("obs_len", o.obs_len)
      .Field("pred_len", o.pred_len)
      .Field("fps", o.fps)
      .Field("substeps", o.substeps)
      .Field("speed_mean", o.speed_mean)
      .Field("speed_std", o.speed_std)
      .Field("min_speed", o.min_speed)
      .Field("max_speed", o.max_speed)
      .Field("min_turn_deg", o.min_turn_deg)
      .Field("max_turn_deg", o.max_turn_deg)
      .Field("min_relax_time", o.min_relax_time)
      .Field("max_relax_time", o.max_relax_time)
      .Field("repulsion_strength", o.repulsion_strength)
      .Field("repulsion_range", o.repulsion_range)
      .Field("agent_radius", o.agent_radius)
      .Field("max_background", o.max_background)
      .Field("max_retries", o.max_retries)
      .Field("first_scene_id", o.first_scene_id)
      .Apply();
}

ModelConfig ModelConfigFromJson(const json& j) {
  ModelConfig c;
  Merge(j, c);
  c.Validate();
  return c;
}

}  // namespace urnn
