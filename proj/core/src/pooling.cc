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

#include "urnn/pooling.h"

#include <cmath>
#include <map>

namespace urnn {

std::string_view ToString(PoolingKind kind) {
  switch (kind) {
    case PoolingKind::kNone:
      return "none";
    case PoolingKind::kOccupancy:
      return "occupancy";
    case PoolingKind::kDirectional:
      return "directional";
    case PoolingKind::kSocial:
      return "social";
  }
  return "?";
}

PoolingKind ParsePoolingKind(std::string_view token) {
  if (token == "none") return PoolingKind::kNone;
  if (token == "occupancy") return PoolingKind::kOccupancy;
  if (token == "directional") return PoolingKind::kDirectional;
  if (token == "social") return PoolingKind::kSocial;
  throw ParseError("unknown pooling kind '" + std::string(token) + "'");
}

size_t PoolingChannels(PoolingKind kind, size_t hidden_dim) {
  switch (kind) {
    case PoolingKind::kNone:
      return 0;
    case PoolingKind::kOccupancy:
      return 1;
    case PoolingKind::kDirectional:
      return 2;
    case PoolingKind::kSocial:
      return hidden_dim;
  }
  return 0;
}

std::optional<uint32_t> CellIndex(Vec2 offset, const GridSpec& spec) {
  const double half = 0.5 * static_cast<double>(spec.n_cells) * spec.cell_side;
  const double fx = std::floor((offset.x + half) / spec.cell_side);
  const double fy = std::floor((offset.y + half) / spec.cell_side);
  const double n = static_cast<double>(spec.n_cells);
  if (!(fx >= 0 && fx < n && fy >= 0 && fy < n)) return std::nullopt;
  return static_cast<uint32_t>(fx) * static_cast<uint32_t>(spec.n_cells) +
         static_cast<uint32_t>(fy);
}

Tensor Rasterize(Vec2 ego_position, std::span<const GridNeighbor> neighbors,
                 const GridSpec& spec, size_t channels, double heading) {
  if (spec.n_cells == 0 || spec.n_cells % 2 != 0 || !(spec.cell_side > 0)) {
    throw ShapeError("grid must have an even positive cell count and positive side");
  }
  Tensor grid({spec.n_cells, spec.n_cells, channels});
  std::vector<int> counts(spec.CellCount(), 0);
  for (const GridNeighbor& nb : neighbors) {
    if (nb.payload.size() != channels) {
      throw ShapeError("rasterize: payload width " + std::to_string(nb.payload.size()) +
                       " != channels " + std::to_string(channels));
    }
    Vec2 off = nb.position - ego_position;
    if (spec.ego_aligned) off = off.Rotated(-heading);
    const auto cell = CellIndex(off, spec);
    if (!cell) continue;
    ++counts[*cell];
    for (size_t k = 0; k < channels; ++k) grid[*cell * channels + k] += nb.payload[k];
  }
  for (size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] <= 1) continue;
    for (size_t k = 0; k < channels; ++k) grid[c * channels + k] /= static_cast<Scalar>(counts[c]);
  }
  return grid;
}

size_t PoolingParams::ParameterCount() const {
  return weight ? weight->value.size() + bias->value.size() : 0;
}

std::vector<Parameter*> PoolingParams::Parameters() {
  if (!weight) return {};
  return {&*weight, &*bias};
}

PoolingParams InitPoolingParams(PoolingKind kind, const GridSpec& grid, size_t hidden_dim,
                                size_t pool_dim, Rng& rng, const std::string& name_prefix) {
  if (pool_dim == 0) throw ShapeError("pool_dim must be positive");
  if (grid.n_cells == 0 || grid.n_cells % 2 != 0 || !(grid.cell_side > 0)) {
    throw ShapeError("grid must have an even positive cell count and positive side");
  }
  PoolingParams p;
  p.kind = kind;
  p.grid = grid;
  p.channels = PoolingChannels(kind, hidden_dim);
  p.pool_dim = pool_dim;
  if (kind == PoolingKind::kNone) return p;
  const size_t fan_in = grid.CellCount() * p.channels;
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Tensor w({fan_in, pool_dim});
  for (Scalar& v : w.data()) v = static_cast<Scalar>(rng.Uniform(-bound, bound));
  Tensor b({pool_dim});
  for (Scalar& v : b.data()) v = static_cast<Scalar>(rng.Uniform(-bound, bound));
  p.weight = Parameter{name_prefix + ".weight", std::move(w), {}};
  p.bias = Parameter{name_prefix + ".bias", std::move(b), {}};
  return p;
}

PoolingVars BindPooling(Graph& graph, PoolingParams& params, bool trainable) {
  PoolingVars v{params.kind, params.grid, params.channels, params.pool_dim, {}, {}};
  if (params.weight) {
    v.weight = trainable ? graph.Param(*params.weight) : graph.Frozen(*params.weight);
    v.bias = trainable ? graph.Param(*params.bias) : graph.Frozen(*params.bias);
  }
  return v;
}

Var EmbedGrid(Var grid, Var weight, Var bias) {
  const Tensor& g = grid.value();
  if (g.size() != weight.value().rows()) {
    throw ShapeError("embed_grid: grid of " + std::to_string(g.size()) +
                     " values vs weight " + weight.value().ShapeString());
  }
  return AddRowBias(MatMul(Reshape(grid, {g.size()}), weight), bias);
}

Var Pool(Graph& graph, const PoolingVars& pooling, const PoolingInput& input) {
  const size_t rows = input.positions.size();
  if (pooling.kind == PoolingKind::kNone) {
    return graph.Constant(Tensor::Zeros({rows, pooling.pool_dim}));
  }
  const GridSpec& spec = pooling.grid;
  const bool directional = pooling.kind == PoolingKind::kDirectional;
  const Tensor* vel = input.velocities.valid() ? &input.velocities.value() : nullptr;
  if ((directional || spec.ego_aligned) && vel == nullptr) {
    throw ShapeError("pool: velocities required");
  }

  std::vector<GridEntry> entries;
  for (const auto& [begin, end] : input.groups) {
    for (size_t i = begin; i < end; ++i) {
      double heading = 0.0;
      if (spec.ego_aligned) {
        const double vx = vel->at(i, 0), vy = vel->at(i, 1);
        if (std::hypot(vx, vy) > 1e-9) heading = std::atan2(vy, vx);
      }
      std::map<uint32_t, std::vector<uint32_t>> cells;
      for (size_t j = begin; j < end; ++j) {
        if (j == i) continue;
        Vec2 off = input.positions[j] - input.positions[i];
        if (spec.ego_aligned) off = off.Rotated(-heading);
        if (const auto cell = CellIndex(off, spec)) {
          cells[*cell].push_back(static_cast<uint32_t>(j));
        }
      }
      const uint32_t ego = static_cast<uint32_t>(i);
      const Scalar c = static_cast<Scalar>(std::cos(heading));
      const Scalar s = static_cast<Scalar>(std::sin(heading));
      for (const auto& [cell, members] : cells) {
        const Scalar w = Scalar(1) / static_cast<Scalar>(members.size());
        if (!directional) {
          for (uint32_t j : members) entries.push_back({ego, cell, j, w});
          continue;
        }
        // Flattened velocity payload (2 rows per pedestrian) so the rotation
        // into the ego frame can be expressed per entry:
        //   out_x = c*vx + s*vy,  out_y = -s*vx + c*vy.
        auto add = [&](uint32_t src, Scalar weight) {
          const uint32_t cx = cell * 2, cy = cell * 2 + 1;
          const Scalar m[2][2] = {{c, s}, {-s, c}};
          for (uint32_t out = 0; out < 2; ++out) {
            for (uint32_t in = 0; in < 2; ++in) {
              const Scalar coef = weight * m[out][in];
              if (coef != 0) entries.push_back({ego, out == 0 ? cx : cy, 2 * src + in, coef});
            }
          }
        };
        for (uint32_t j : members) add(j, w);
        if (spec.relative_velocity) add(ego, Scalar(-1));
      }
    }
  }

  Var payload;
  switch (pooling.kind) {
    case PoolingKind::kOccupancy:
      payload = graph.Constant(Tensor({rows, 1}, Scalar(1)));
      break;
    case PoolingKind::kDirectional:
      payload = Reshape(input.velocities, {2 * rows, 1});
      break;
    case PoolingKind::kSocial:
      payload = input.hidden;
      break;
    case PoolingKind::kNone:
      break;
  }
  return AddRowBias(GridLinear(payload, entries, rows, pooling.weight), pooling.bias);
}

}  // namespace urnn
