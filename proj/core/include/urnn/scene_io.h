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

#ifndef URNN_SCENE_IO_H_
#define URNN_SCENE_IO_H_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urnn/categorize.h"
#include "urnn/scene.h"

namespace urnn {

enum class SceneFormat { kNdjson, kCsv };

// .csv -> kCsv, anything else -> kNdjson.
SceneFormat FormatFromPath(const std::string& path);

struct CsvOptions {
  size_t window = 21;  // frames per derived scene
  size_t stride = 2;   // window start advance, in frame steps
  double fps = 2.5;
};

// Line-oriented benchmark format:
//   {"scene": {"id": <id>, "p": <primary>, "s": <start>, "e": <end>}}
//   {"track": {"f": <frame>, "p": <ped>, "x": <m>, "y": <m>}}
// Unknown keys are ignored. Errors carry the 1-based line number.
std::vector<Scene> ParseNdjson(std::istream& in);
// `frame,ped_id,x,y` rows (optional header); every pedestrian with a full
// window of consecutive frames yields a scene with that pedestrian primary.
std::vector<Scene> ParseCsv(std::istream& in, const CsvOptions& options = {});
std::vector<Scene> ParseScenes(const std::string& path, SceneFormat format,
                               const CsvOptions& csv = {});
std::vector<Scene> ParseScenes(const std::string& path);

// Scene records first (with a "tag": [category, [subtype]] entry when types
// are given), then the union of all track samples ordered by (frame, ped).
void WriteNdjson(std::ostream& out, std::span<const Scene> scenes,
                 std::span<const SceneType> types = {});
void WriteNdjsonFile(const std::string& path, std::span<const Scene> scenes,
                     std::span<const SceneType> types = {});

}  // namespace urnn

#endif  // URNN_SCENE_IO_H_
