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

#include "urnn/scene_io.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

namespace urnn {
namespace {

using nlohmann::json;

struct SceneRecord {
  int64_t id;
  int64_t primary;
  int64_t start;
  int64_t end;
  double fps;
  size_t line;
};

// Samples per pedestrian (frame-ordered) plus an index of who is present at
// each frame.
struct TrackIndex {
  std::map<int64_t, std::vector<TrackPoint>> by_ped;
  std::map<int64_t, std::set<int64_t>> by_frame;

  void Add(int64_t ped, const TrackPoint& p) {
    by_ped[ped].push_back(p);
    by_frame[p.frame].insert(ped);
  }

  std::vector<TrackPoint> Window(int64_t ped, int64_t start, int64_t end) const {
    const auto& pts = by_ped.at(ped);
    auto lo = std::lower_bound(pts.begin(), pts.end(), start,
                               [](const TrackPoint& p, int64_t f) { return p.frame < f; });
    auto hi = std::upper_bound(pts.begin(), pts.end(), end,
                               [](int64_t f, const TrackPoint& p) { return f < p.frame; });
    return {lo, hi};
  }
};

Scene BuildScene(const SceneRecord& rec, const TrackIndex& index) {
  auto it = index.by_ped.find(rec.primary);
  if (it == index.by_ped.end()) {
    throw ParseError("line " + std::to_string(rec.line) + ": scene " + std::to_string(rec.id) +
                     " references primary pedestrian " + std::to_string(rec.primary) +
                     " which has no track");
  }
  Scene scene;
  scene.id = rec.id;
  scene.primary_id = rec.primary;
  scene.start_frame = rec.start;
  scene.end_frame = rec.end;
  scene.fps = rec.fps;
  Track primary{rec.primary, index.Window(rec.primary, rec.start, rec.end)};
  if (primary.points.empty() || primary.points.front().frame != rec.start ||
      primary.points.back().frame != rec.end) {
    throw ParseError("line " + std::to_string(rec.line) + ": scene " + std::to_string(rec.id) +
                     " primary pedestrian " + std::to_string(rec.primary) +
                     " does not cover frames " + std::to_string(rec.start) + ".." +
                     std::to_string(rec.end));
  }
  scene.tracks.push_back(std::move(primary));
  std::set<int64_t> others;
  for (auto f = index.by_frame.lower_bound(rec.start);
       f != index.by_frame.end() && f->first <= rec.end; ++f) {
    for (int64_t ped : f->second) {
      if (ped != rec.primary) others.insert(ped);
    }
  }
  for (int64_t ped : others) scene.tracks.push_back({ped, index.Window(ped, rec.start, rec.end)});
  return scene;
}

template <typename T>
T Field(const json& obj, const char* key, size_t line) {
  if (!obj.contains(key)) {
    throw ParseError("line " + std::to_string(line) + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError("line " + std::to_string(line) + ": bad field '" + key + "': " + e.what());
  }
}

}  // namespace

SceneFormat FormatFromPath(const std::string& path) {
  const std::string ext = ".csv";
  if (path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0) {
    return SceneFormat::kCsv;
  }
  return SceneFormat::kNdjson;
}

std::vector<Scene> ParseNdjson(std::istream& in) {
  TrackIndex index;
  std::vector<SceneRecord> records;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(lineno) + ": malformed JSON: " + e.what());
    }
    if (!row.is_object()) throw ParseError("line " + std::to_string(lineno) + ": not an object");
    if (row.contains("track")) {
      const json& t = row["track"];
      const int64_t ped = Field<int64_t>(t, "p", lineno);
      TrackPoint p{Field<int64_t>(t, "f", lineno), Field<double>(t, "x", lineno),
                   Field<double>(t, "y", lineno)};
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw ParseError("line " + std::to_string(lineno) + ": non-finite coordinate");
      }
      auto it = index.by_ped.find(ped);
      if (it != index.by_ped.end() && it->second.back().frame >= p.frame) {
        throw ParseError("line " + std::to_string(lineno) + ": pedestrian " +
                         std::to_string(ped) + " has non-increasing frames (" +
                         std::to_string(it->second.back().frame) + " then " +
                         std::to_string(p.frame) + ")");
      }
      index.Add(ped, p);
    } else if (row.contains("scene")) {
      const json& s = row["scene"];
      SceneRecord rec{Field<int64_t>(s, "id", lineno), Field<int64_t>(s, "p", lineno),
                      Field<int64_t>(s, "s", lineno),  Field<int64_t>(s, "e", lineno),
                      s.contains("fps") ? Field<double>(s, "fps", lineno) : 2.5,
                      lineno};
      if (rec.end < rec.start) {
        throw ParseError("line " + std::to_string(lineno) + ": scene ends before it starts");
      }
      records.push_back(rec);
    }
  }
  std::vector<Scene> scenes;
  scenes.reserve(records.size());
  for (const SceneRecord& rec : records) scenes.push_back(BuildScene(rec, index));
  return scenes;
}

std::vector<Scene> ParseCsv(std::istream& in, const CsvOptions& options) {
  if (options.window < 2 || options.stride < 1) throw Error("csv: bad window options");
  TrackIndex index;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double frame, ped, x, y;
    if (!(row >> frame >> ped >> x >> y)) {
      if (lineno == 1) continue;  // header
      throw ParseError("line " + std::to_string(lineno) + ": expected frame,ped_id,x,y");
    }
    const int64_t f = static_cast<int64_t>(frame);
    const int64_t p = static_cast<int64_t>(ped);
    auto it = index.by_ped.find(p);
    if (it != index.by_ped.end() && it->second.back().frame >= f) {
      throw ParseError("line " + std::to_string(lineno) + ": pedestrian " + std::to_string(p) +
                       " has non-increasing frames");
    }
    index.Add(p, {f, x, y});
  }
  if (index.by_frame.size() < 2) return {};
  int64_t step = 0;
  for (auto a = index.by_frame.begin(), b = std::next(a); b != index.by_frame.end(); ++a, ++b) {
    const int64_t d = b->first - a->first;
    if (step == 0 || d < step) step = d;
  }

  std::vector<Scene> scenes;
  int64_t next_id = 0;
  const int64_t span = static_cast<int64_t>(options.window - 1) * step;
  for (const auto& [ped, pts] : index.by_ped) {
    std::set<int64_t> frames;
    for (const auto& p : pts) frames.insert(p.frame);
    int64_t last_start = INT64_MIN;
    for (int64_t start : frames) {
      if (last_start != INT64_MIN && start - last_start < static_cast<int64_t>(options.stride) * step) {
        continue;
      }
      bool full = true;
      for (size_t k = 0; k < options.window && full; ++k) {
        full = frames.count(start + static_cast<int64_t>(k) * step) > 0;
      }
      if (!full) continue;
      last_start = start;
      SceneRecord rec{next_id++, ped, start, start + span, options.fps, 0};
      Scene scene = BuildScene(rec, index);
      // Keep only on-grid samples so the primary stays uniformly spaced.
      for (Track& t : scene.tracks) {
        std::erase_if(t.points, [&](const TrackPoint& p) { return (p.frame - start) % step != 0; });
      }
      std::erase_if(scene.tracks, [](const Track& t) { return t.points.empty(); });
      scenes.push_back(std::move(scene));
    }
  }
  return scenes;
}

std::vector<Scene> ParseScenes(const std::string& path, SceneFormat format, const CsvOptions& csv) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return format == SceneFormat::kCsv ? ParseCsv(in, csv) : ParseNdjson(in);
}

std::vector<Scene> ParseScenes(const std::string& path) {
  return ParseScenes(path, FormatFromPath(path));
}

void WriteNdjson(std::ostream& out, std::span<const Scene> scenes, std::span<const SceneType> types) {
  if (!types.empty() && types.size() != scenes.size()) {
    throw Error("write_ndjson: one type per scene required");
  }
  std::map<std::pair<int64_t, int64_t>, std::pair<double, double>> samples;
  for (size_t i = 0; i < scenes.size(); ++i) {
    const Scene& s = scenes[i];
    json rec = {{"id", s.id}, {"p", s.primary_id}, {"s", s.start_frame}, {"e", s.end_frame},
                {"fps", s.fps}};
    if (!types.empty()) {
      json subs = json::array();
      if (types[i].subtype) subs.push_back(static_cast<int>(*types[i].subtype));
      rec["tag"] = json::array({static_cast<int>(types[i].category), subs});
    }
    out << json{{"scene", rec}}.dump() << '\n';
    for (const Track& t : s.tracks) {
      for (const TrackPoint& p : t.points) {
        auto [it, inserted] = samples.try_emplace({p.frame, t.ped_id}, p.x, p.y);
        if (!inserted && it->second != std::make_pair(p.x, p.y)) {
          throw Error("write_ndjson: conflicting samples for pedestrian " +
                      std::to_string(t.ped_id) + " at frame " + std::to_string(p.frame));
        }
      }
    }
  }
  for (const auto& [key, xy] : samples) {
    const json row = {{"f", key.first}, {"p", key.second}, {"x", xy.first}, {"y", xy.second}};
    out << json{{"track", row}}.dump() << '\n';
  }
}

void WriteNdjsonFile(const std::string& path, std::span<const Scene> scenes,
                     std::span<const SceneType> types) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  WriteNdjson(out, scenes, types);
  if (!out) throw Error("failed writing " + path);
}

}  // namespace urnn
