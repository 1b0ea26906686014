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

#include "urnn/metrics.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

namespace urnn {
namespace {

const char* const kBucketNames[] = {
    "overall", "I", "II", "III", "IV", "III/leader_follower", "III/collision_avoidance",
    "III/group", "III/others",
};

void RequireAligned(std::span<const Vec2> pred, std::span<const Vec2> truth) {
  if (pred.empty() || pred.size() != truth.size()) {
    throw ShapeError("metrics: trajectories must be non-empty and equally long");
  }
}

std::string Fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

double Ade(std::span<const Vec2> pred, std::span<const Vec2> truth) {
  RequireAligned(pred, truth);
  double sum = 0.0;
  for (size_t t = 0; t < pred.size(); ++t) sum += Distance(pred[t], truth[t]);
  return sum / static_cast<double>(pred.size());
}

double Fde(std::span<const Vec2> pred, std::span<const Vec2> truth) {
  RequireAligned(pred, truth);
  return Distance(pred.back(), truth.back());
}

bool Collides(std::span<const Vec2> primary, std::span<const Vec2> other, double threshold,
              size_t subframe_steps, std::span<const bool> other_valid) {
  if (primary.size() != other.size()) throw ShapeError("collisions: trajectories not aligned");
  if (!other_valid.empty() && other_valid.size() != other.size()) {
    throw ShapeError("collisions: validity mask not aligned");
  }
  auto valid = [&](size_t t) { return other_valid.empty() || other_valid[t]; };
  for (size_t t = 0; t < primary.size(); ++t) {
    if (valid(t) && Distance(primary[t], other[t]) < threshold) return true;
  }
  const double denom = static_cast<double>(subframe_steps + 1);
  for (size_t t = 0; t + 1 < primary.size(); ++t) {
    if (!valid(t) || !valid(t + 1)) continue;
    for (size_t k = 1; k <= subframe_steps; ++k) {
      const double a = static_cast<double>(k) / denom;
      const Vec2 p = primary[t] * (1.0 - a) + primary[t + 1] * a;
      const Vec2 q = other[t] * (1.0 - a) + other[t + 1] * a;
      if (Distance(p, q) < threshold) return true;
    }
  }
  return false;
}

const MetricsBucket& MetricsReport::bucket(const std::string& name) const {
  for (const auto& b : buckets) {
    if (b.name == name) return b;
  }
  throw Error("no metrics bucket named '" + name + "'");
}

MetricsReport EmptyReport() {
  MetricsReport r;
  for (const char* name : kBucketNames) r.buckets.push_back({name});
  return r;
}

void AddScore(MetricsReport& report, const SceneScore& score) {
  auto add = [&](MetricsBucket& b) {
    ++b.count;
    b.ade_sum += score.ade;
    b.fde_sum += score.fde;
    b.col1 += score.col1 ? 1 : 0;
    b.col2 += score.col2 ? 1 : 0;
  };
  add(report.buckets[0]);
  add(report.buckets[static_cast<size_t>(score.type.category)]);
  if (score.type.subtype) add(report.buckets[4 + static_cast<size_t>(*score.type.subtype)]);
}

SceneScore ScoreScene(const PreparedScene& scene, const SceneType& type,
                      const ScenePrediction& prediction, const EvaluateOptions& options) {
  if (prediction.positions.size() != scene.num_peds()) {
    throw ShapeError("evaluate: prediction rows do not match the scene");
  }
  const std::span<const Vec2> primary_pred = prediction.positions[0];
  const std::span<const Vec2> primary_truth = scene.Future(0);
  SceneScore s{scene.scene_id, type, Ade(primary_pred, primary_truth),
               Fde(primary_pred, primary_truth), false, false};
  for (size_t i = 1; i < scene.num_peds() && !s.col1; ++i) {
    s.col1 = Collides(primary_pred, prediction.positions[i], options.collision_threshold,
                      options.subframe_steps);
  }
  auto future_mask = [&](const std::vector<bool>& seen) {
    // std::vector<bool> has no contiguous storage; copy into a plain array.
    std::unique_ptr<bool[]> m(new bool[scene.pred_len]);
    for (size_t t = 0; t < scene.pred_len; ++t) m[t] = seen[scene.obs_len + t];
    return m;
  };
  for (size_t i = 1; i < scene.num_peds() && !s.col2; ++i) {
    const auto mask = future_mask(scene.observed[i]);
    s.col2 = Collides(primary_pred, scene.Future(i), options.collision_threshold,
                      options.subframe_steps, std::span<const bool>(mask.get(), scene.pred_len));
  }
  for (size_t i = 0; i < scene.late.size() && !s.col2; ++i) {
    const auto& late = scene.late[i];
    const auto mask = future_mask(late.observed);
    s.col2 = Collides(primary_pred,
                      std::span<const Vec2>(late.positions).subspan(scene.obs_len, scene.pred_len),
                      options.collision_threshold, options.subframe_steps,
                      std::span<const bool>(mask.get(), scene.pred_len));
  }
  return s;
}

MetricsReport Evaluate(Predictor& predictor, std::span<const Scene> scenes,
                       const EvaluateOptions& options, std::vector<SceneScore>* per_scene) {
  const CategorizeOptions& cat = options.categorize;
  std::vector<PreparedScene> prepared;
  std::vector<SceneType> types;
  for (const Scene& scene : scenes) {
    PreparedScene p = PrepareScene(scene, cat.obs_len, cat.pred_len);
    SceneType type = Categorize(p, cat);
    if (!options.categories.empty() && !options.categories.count(type.category)) continue;
    prepared.push_back(std::move(p));
    types.push_back(type);
  }
  const std::vector<ScenePrediction> predictions = predictor.PredictBatch(prepared);
  MetricsReport report = EmptyReport();
  for (size_t i = 0; i < prepared.size(); ++i) {
    const SceneScore score = ScoreScene(prepared[i], types[i], predictions[i], options);
    AddScore(report, score);
    if (per_scene) per_scene->push_back(score);
  }
  return report;
}

TableRow RowFromBucket(const std::string& model, const std::string& interaction,
                       const MetricsBucket& bucket) {
  TableRow row;
  row.model = model;
  row.interaction = interaction;
  row.ade = bucket.ade();
  row.fde = bucket.fde();
  row.col1 = bucket.col1_pct();
  row.col2 = bucket.col2_pct();
  row.scenes = bucket.count;
  return row;
}

RowComparison CompareRows(const TableRow& a, const TableRow& b, const NoiseFloor& floor) {
  RowComparison c;
  c.ade = a.ade - b.ade;
  c.fde = a.fde - b.fde;
  c.col1 = a.col1 - b.col1;
  c.ade_significant = std::abs(c.ade) >= floor.ade;
  c.fde_significant = std::abs(c.fde) >= floor.fde;
  c.col1_significant = std::abs(c.col1) >= floor.col1;
  return c;
}

void PrintTable(std::ostream& out, std::span<const TableRow> rows) {
  const bool spread = std::any_of(rows.begin(), rows.end(),
                                  [](const TableRow& r) { return r.ade_spread.has_value(); });
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = {"Model", "Interaction", "ADE (m)", "FDE (m)", "Col-I (%)",
                                     "Col-II (%)"};
  if (spread) {
    header.insert(header.end(), {"ADE spread", "FDE spread", "Col-I spread", "Col-II spread",
                                 "Runs"});
  }
  header.push_back("Scenes");
  cells.push_back(header);
  for (const TableRow& r : rows) {
    std::vector<std::string> c = {r.model,         r.interaction,  Fixed(r.ade, 3),
                                  Fixed(r.fde, 3), Fixed(r.col1, 1), Fixed(r.col2, 1)};
    if (spread) {
      auto opt = [](const std::optional<double>& v, int d) { return v ? Fixed(*v, d) : "-"; };
      c.insert(c.end(), {opt(r.ade_spread, 3), opt(r.fde_spread, 3), opt(r.col1_spread, 1),
                         opt(r.col2_spread, 1), r.runs ? std::to_string(*r.runs) : "-"});
    }
    c.push_back(std::to_string(r.scenes));
    cells.push_back(std::move(c));
  }
  std::vector<size_t> width(header.size(), 0);
  for (const auto& row : cells) {
    for (size_t k = 0; k < row.size(); ++k) width[k] = std::max(width[k], row[k].size());
  }
  for (size_t r = 0; r < cells.size(); ++r) {
    for (size_t k = 0; k < cells[r].size(); ++k) {
      if (k) out << " | ";
      const bool left = k < 2;
      out << (left ? std::left : std::right) << std::setw(static_cast<int>(width[k]))
          << cells[r][k];
    }
    out << std::right << '\n';
    if (r == 0) {
      size_t total = 0;
      for (size_t w : width) total += w;
      out << std::string(total + 3 * (width.size() - 1), '-') << '\n';
    }
  }
}

void WriteTableCsv(std::ostream& out, std::span<const TableRow> rows) {
  out << "model,interaction,ade,fde,col1,col2,scenes,ade_spread,fde_spread,col1_spread,"
         "col2_spread,runs\n";
  out << std::setprecision(17);
  auto opt = [](const auto& v) {
    std::ostringstream os;
    os << std::setprecision(17);
    if (v) os << *v;
    return os.str();
  };
  for (const TableRow& r : rows) {
    out << '"' << r.model << "\",\"" << r.interaction << "\"," << r.ade << ',' << r.fde << ','
        << r.col1 << ',' << r.col2 << ',' << r.scenes << ',' << opt(r.ade_spread) << ','
        << opt(r.fde_spread) << ',' << opt(r.col1_spread) << ',' << opt(r.col2_spread) << ','
        << opt(r.runs) << '\n';
  }
}

void WriteReportCsv(std::ostream& out, std::span<const std::string> models,
                    std::span<const MetricsReport> reports) {
  out << "model,bucket,scenes,ade,fde,col1,col2\n";
  out << std::setprecision(17);
  for (size_t m = 0; m < reports.size(); ++m) {
    for (const MetricsBucket& b : reports[m].buckets) {
      out << '"' << models[m] << "\"," << b.name << ',' << b.count << ',' << b.ade() << ','
          << b.fde() << ',' << b.col1_pct() << ',' << b.col2_pct() << '\n';
    }
  }
}

}  // namespace urnn
