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

#ifndef URNN_METRICS_H_
#define URNN_METRICS_H_

#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "urnn/categorize.h"
#include "urnn/predictor.h"

namespace urnn {

// Mean Euclidean distance over aligned steps.
double Ade(std::span<const Vec2> pred, std::span<const Vec2> truth);
// Euclidean distance at the final step.
double Fde(std::span<const Vec2> pred, std::span<const Vec2> truth);

// True when the two trajectories come within `threshold` meters at any
// frame or at any of `subframe_steps` evenly spaced points linearly
// interpolated inside each frame interval. When `other_valid` is given,
// only frames (and intervals between two valid frames) where the other
// trajectory is valid are checked.
bool Collides(std::span<const Vec2> primary, std::span<const Vec2> other, double threshold,
              size_t subframe_steps, std::span<const bool> other_valid = {});

struct EvaluateOptions {
  double collision_threshold = 0.1;
  size_t subframe_steps = 4;
  CategorizeOptions categorize;
  // When non-empty, only scenes of these categories are scored.
  std::set<SceneCategory> categories;
};

struct MetricsBucket {
  std::string name;
  size_t count = 0;
  double ade_sum = 0.0;
  double fde_sum = 0.0;
  size_t col1 = 0;
  size_t col2 = 0;

  double ade() const { return count ? ade_sum / static_cast<double>(count) : 0.0; }
  double fde() const { return count ? fde_sum / static_cast<double>(count) : 0.0; }
  double col1_pct() const { return count ? 100.0 * col1 / static_cast<double>(count) : 0.0; }
  double col2_pct() const { return count ? 100.0 * col2 / static_cast<double>(count) : 0.0; }
};

// Aggregates per bucket: overall, I, II, III, IV, then the Type III
// subtypes.
struct MetricsReport {
  std::vector<MetricsBucket> buckets;

  const MetricsBucket& bucket(const std::string& name) const;
  const MetricsBucket& overall() const { return buckets.front(); }
};

MetricsReport EmptyReport();

// Per-scene outcome; kept for cross-checks and CSV dumps.
struct SceneScore {
  int64_t scene_id;
  SceneType type;
  double ade;
  double fde;
  bool col1;
  bool col2;
};

// Adds one scored scene to every bucket it belongs to.
void AddScore(MetricsReport& report, const SceneScore& score);

SceneScore ScoreScene(const PreparedScene& scene, const SceneType& type,
                      const ScenePrediction& prediction, const EvaluateOptions& options);

// Predicts every scene and aggregates ADE/FDE of the primary, Col-I
// (against predicted neighbours) and Col-II (against ground-truth
// neighbours) by scene type.
MetricsReport Evaluate(Predictor& predictor, std::span<const Scene> scenes,
                       const EvaluateOptions& options = {},
                       std::vector<SceneScore>* per_scene = nullptr);

// One Model / Interaction row of a comparison table.
struct TableRow {
  std::string model;
  std::string interaction;
  double ade = 0.0;
  double fde = 0.0;
  double col1 = 0.0;
  double col2 = 0.0;
  size_t scenes = 0;
  // Optional spread columns (max - min over seeds) for repeated runs.
  std::optional<double> ade_spread;
  std::optional<double> fde_spread;
  std::optional<double> col1_spread;
  std::optional<double> col2_spread;
  std::optional<size_t> runs;
};

TableRow RowFromBucket(const std::string& model, const std::string& interaction,
                       const MetricsBucket& bucket);

// Smallest differences treated as meaningful when comparing two rows.
struct NoiseFloor {
  double ade = 0.01;   // meters
  double fde = 0.01;   // meters
  double col1 = 0.5;   // percentage points
};

// Row `a` minus row `b`, with per-metric significance under the floor.
struct RowComparison {
  double ade = 0.0;
  double fde = 0.0;
  double col1 = 0.0;
  bool ade_significant = false;
  bool fde_significant = false;
  bool col1_significant = false;
};

RowComparison CompareRows(const TableRow& a, const TableRow& b, const NoiseFloor& floor = {});

// Aligned plain-text table: Model, Interaction, ADE, FDE, Col-I, Col-II.
void PrintTable(std::ostream& out, std::span<const TableRow> rows);
void WriteTableCsv(std::ostream& out, std::span<const TableRow> rows);
// Every bucket of every report, one CSV line per (model, bucket).
void WriteReportCsv(std::ostream& out, std::span<const std::string> models,
                    std::span<const MetricsReport> reports);

}  // namespace urnn

#endif  // URNN_METRICS_H_
