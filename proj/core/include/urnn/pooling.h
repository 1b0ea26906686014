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

#ifndef URNN_POOLING_H_
#define URNN_POOLING_H_

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "urnn/graph.h"

namespace urnn {

enum class PoolingKind { kNone, kOccupancy, kDirectional, kSocial };

std::string_view ToString(PoolingKind kind);
PoolingKind ParsePoolingKind(std::string_view token);

// Square grid centred on the ego pedestrian. Cell (ix, iy) covers the
// half-open offsets [ix*side - half, (ix+1)*side - half) on x (same on y),
// half = n_cells * side / 2.
struct GridSpec {
  size_t n_cells = 12;
  double cell_side = 0.6;
  // Rotate offsets (and directional payloads) into the ego heading frame.
  bool ego_aligned = false;
  // Directional payload: neighbour velocity minus ego velocity. When false,
  // the absolute neighbour velocity is pooled.
  bool relative_velocity = true;

  size_t CellCount() const { return n_cells * n_cells; }
};

// Payload width per cell for a pooling kind (0 for kNone).
size_t PoolingChannels(PoolingKind kind, size_t hidden_dim);

// Cell containing the offset, or nullopt when it lies outside the grid.
std::optional<uint32_t> CellIndex(Vec2 offset, const GridSpec& spec);

struct GridNeighbor {
  Vec2 position;
  std::vector<Scalar> payload;
};

// Mean-pooled grid of neighbour payloads, shape n x n x channels. Cells with
// k > 0 neighbours hold the mean payload; out-of-range neighbours are
// ignored. `heading` is used only when spec.ego_aligned is set.
Tensor Rasterize(Vec2 ego_position, std::span<const GridNeighbor> neighbors,
                 const GridSpec& spec, size_t channels, double heading = 0.0);

struct PoolingParams {
  PoolingKind kind = PoolingKind::kNone;
  GridSpec grid;
  size_t channels = 0;
  size_t pool_dim = 0;
  // Absent for kNone.
  std::optional<Parameter> weight;  // (cells * channels) x pool_dim
  std::optional<Parameter> bias;    // pool_dim

  size_t ParameterCount() const;
  std::vector<Parameter*> Parameters();
};

PoolingParams InitPoolingParams(PoolingKind kind, const GridSpec& grid, size_t hidden_dim,
                                size_t pool_dim, Rng& rng,
                                const std::string& name_prefix = "pool");

struct PoolingVars {
  PoolingKind kind;
  GridSpec grid;
  size_t channels;
  size_t pool_dim;
  Var weight;
  Var bias;
};

PoolingVars BindPooling(Graph& graph, PoolingParams& params, bool trainable);

// Linear embedding of a dense grid (any shape; flattened row-major).
Var EmbedGrid(Var grid, Var weight, Var bias);

// Everything the pooling step needs about the current decoding state.
struct PoolingInput {
  // Current position of every row (values only; cell membership is not
  // differentiable).
  std::span<const Vec2> positions;
  // rows x 2 current velocities (directional payload).
  Var velocities;
  // rows x hidden current decoder states (social payload).
  Var hidden;
  // Rows [begin, end) that share a scene; pedestrians only see neighbours
  // from their own scene.
  std::span<const std::pair<size_t, size_t>> groups;
};

// Interaction embedding for every row: rows x pool_dim. kNone yields zeros.
Var Pool(Graph& graph, const PoolingVars& pooling, const PoolingInput& input);

}  // namespace urnn

#endif  // URNN_POOLING_H_
