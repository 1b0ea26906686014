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

#ifndef URNN_MODEL_IO_H_
#define URNN_MODEL_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "urnn/model.h"

namespace urnn {

inline constexpr uint16_t kModelFormatVersion = 1;

// Binary layout (little-endian):
//   "URNN" | u16 version | u32 n | n bytes canonical config JSON |
//   u32 record count | records | u32 CRC-32 of everything before it
// record: u32 name length | name | u32 rank | rank x u64 extents |
//         f64 values
std::vector<uint8_t> SerializeModel(const ForecastModel& model);
// Throws VersionError on a different format version and IntegrityError on
// a bad magic, checksum, truncation or parameter mismatch.
ForecastModel DeserializeModel(const std::vector<uint8_t>& bytes);

void SaveModel(const ForecastModel& model, const std::string& path);
ForecastModel LoadModel(const std::string& path);

}  // namespace urnn

#endif  // URNN_MODEL_IO_H_
