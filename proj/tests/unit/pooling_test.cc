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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "testing/oracles.h"

namespace urnn {
namespace {

using testing::RandomTensor;

GridSpec DefaultGrid() { return GridSpec{}; }

TEST(PoolingKindTest, TokensRoundTrip) {
  for (auto k : {PoolingKind::kNone, PoolingKind::kOccupancy, PoolingKind::kDirectional,
                 PoolingKind::kSocial}) {
    EXPECT_EQ(ParsePoolingKind(ToString(k)), k);
  }
  EXPECT_THROW(ParsePoolingKind("attention"), ParseError);
  EXPECT_EQ(PoolingChannels(PoolingKind::kNone, 7), 0u);
  EXPECT_EQ(PoolingChannels(PoolingKind::kOccupancy, 7), 1u);
  EXPECT_EQ(PoolingChannels(PoolingKind::kDirectional, 7), 2u);
  EXPECT_EQ(PoolingChannels(PoolingKind::kSocial, 7), 7u);
}

TEST(CellIndexTest, HalfOpenBoundaries) {
  const GridSpec spec = DefaultGrid();
  // (0.1, 0.1) sits in cell (6, 6).
  EXPECT_EQ(CellIndex({0.1, 0.1}, spec), 6u * 12 + 6);
  EXPECT_EQ(CellIndex({0.0, 0.0}, spec), 6u * 12 + 6);
  EXPECT_EQ(CellIndex({-1e-12, 0.0}, spec), 5u * 12 + 6);
  // Dyadic side so the edges are exact: half extent 3 m.
  GridSpec exact;
  exact.cell_side = 0.5;
  EXPECT_EQ(CellIndex({-3.0, -3.0}, exact), 0u);
  EXPECT_EQ(CellIndex({0.5, -0.5}, exact), 7u * 12 + 5);
  EXPECT_FALSE(CellIndex({3.0, 0.0}, exact).has_value());
  EXPECT_FALSE(CellIndex({0.0, -3.0000001}, exact).has_value());
}

TEST(RasterizeTest, NoNeighborsGivesZeroGrid) {
  const Tensor g = Rasterize({1, 2}, {}, DefaultGrid(), 2);
  EXPECT_EQ(g, Tensor({12, 12, 2}));
}

TEST(RasterizeTest, SingleNeighborOccupiesOneCell) {
  const GridNeighbor nb[] = {{{5.1, -2.9}, {1}}};
  const Tensor g = Rasterize({5, -3}, nb, DefaultGrid(), 1);
  const size_t cell = *CellIndex({0.1, 0.1}, DefaultGrid());
  for (size_t c = 0; c < g.size(); ++c) EXPECT_EQ(g[c], c == cell ? 1 : 0);
}

TEST(RasterizeTest, SameCellNeighborsAreAveraged) {
  const GridNeighbor nb[] = {{{0.1, 0.1}, {1, 0}}, {{0.2, 0.3}, {0, 1}}};
  const Tensor g = Rasterize({0, 0}, nb, DefaultGrid(), 2);
  const size_t cell = *CellIndex({0.1, 0.1}, DefaultGrid());
  EXPECT_EQ(g[2 * cell], 0.5);
  EXPECT_EQ(g[2 * cell + 1], 0.5);
  EXPECT_DOUBLE_EQ(std::accumulate(g.data().begin(), g.data().end(), 0.0), 1.0);
}

TEST(RasterizeTest, PayloadWidthMismatchThrows) {
  const GridNeighbor nb[] = {{{0.1, 0.1}, {1, 0, 0}}};
  EXPECT_THROW(Rasterize({0, 0}, nb, DefaultGrid(), 2), ShapeError);
  GridSpec odd;
  odd.n_cells = 5;
  EXPECT_THROW(Rasterize({0, 0}, {}, odd, 1), ShapeError);
}

TEST(RasterizeTest, PermutationInvariant) {
  Rng rng(1);
  for (int draw = 0; draw < 50; ++draw) {
    std::vector<GridNeighbor> nb;
    for (int k = 0; k < 8; ++k) {
      // Quarter-metre lattice keeps cell sums exact under reordering.
      nb.push_back({{0.25 * std::floor(rng.Uniform(-16, 16)), 0.25 * std::floor(rng.Uniform(-16, 16))},
                    {0.5 * std::floor(rng.Uniform(-8, 8)), 0.5 * std::floor(rng.Uniform(-8, 8))}});
    }
    const Tensor base = Rasterize({0.05, -0.05}, nb, DefaultGrid(), 2);
    std::vector<GridNeighbor> shuffled = nb;
    rng.Shuffle(shuffled);
    EXPECT_EQ(Rasterize({0.05, -0.05}, shuffled, DefaultGrid(), 2), base);
  }
}

TEST(RasterizeTest, DistantNeighborsNeverMatter) {
  Rng rng(2);
  const GridSpec spec = DefaultGrid();
  const double radius = spec.n_cells * spec.cell_side / std::sqrt(2.0) + spec.cell_side;
  for (int draw = 0; draw < 100; ++draw) {
    const double angle = rng.Uniform(0, 2 * M_PI);
    const double r = radius + rng.Uniform(1e-6, 10);
    const GridNeighbor far[] = {{{r * std::cos(angle), r * std::sin(angle)}, {1}}};
    EXPECT_EQ(Rasterize({0, 0}, far, spec, 1), Tensor({12, 12, 1}));
  }
}

TEST(RasterizeTest, EgoAlignedRotatesOffsets) {
  GridSpec spec = DefaultGrid();
  spec.ego_aligned = true;
  // Heading +y: a neighbour straight ahead lands on the +x side of the grid.
  const GridNeighbor nb[] = {{{0, 1.0}, {1}}};
  const Tensor g = Rasterize({0, 0}, nb, spec, 1, M_PI / 2);
  EXPECT_EQ(g[*CellIndex({1.0, 0.0}, spec)], 1);
}

TEST(EmbedGridTest, ZeroGridGivesBiasAndIsAffine) {
  Rng rng(3);
  Graph g;
  const Var w = g.Constant(RandomTensor({8, 3}, rng));
  const Var b = g.Constant(RandomTensor({3}, rng));
  const Tensor zero_out = EmbedGrid(g.Constant(Tensor({2, 2, 2})), w, b).value();
  for (size_t k = 0; k < 3; ++k) EXPECT_EQ(zero_out[k], b.value()[k]);
  const Tensor g1 = RandomTensor({2, 2, 2}, rng), g2 = RandomTensor({2, 2, 2}, rng);
  Tensor sum = g1;
  for (size_t i = 0; i < sum.size(); ++i) sum[i] += g2[i];
  const Tensor e1 = EmbedGrid(g.Constant(g1), w, b).value();
  const Tensor e2 = EmbedGrid(g.Constant(g2), w, b).value();
  const Tensor e12 = EmbedGrid(g.Constant(sum), w, b).value();
  for (size_t k = 0; k < 3; ++k) EXPECT_NEAR(e12[k], e1[k] + e2[k] - b.value()[k], 1e-14);
  EXPECT_THROW(EmbedGrid(g.Constant(Tensor({3, 3})), w, b), ShapeError);
}

TEST(EmbedGridTest, WeightGradientsMatchFiniteDifferences) {
  Rng rng(4);
  const Tensor grid = RandomTensor({2, 2, 2}, rng);
  const auto check = testing::CheckGradients(
      [&](Graph& g, std::span<const Var> x) {
        return Sum(Square(EmbedGrid(g.Constant(grid), x[0], x[1])));
      },
      {RandomTensor({8, 3}, rng), RandomTensor({3}, rng)});
  EXPECT_LT(check.max_relative_error, 1e-6);
}

// Pool against per-row Rasterize + EmbedGrid on random multi-scene batches.
struct PoolFixture {
  std::vector<Vec2> positions;
  Tensor velocities;
  Tensor hidden;
  std::vector<std::pair<size_t, size_t>> groups;
};

PoolFixture RandomBatch(Rng& rng, size_t hidden_dim) {
  PoolFixture f;
  f.groups = {{0, 3}, {3, 7}, {7, 8}};
  const size_t rows = 8;
  for (size_t i = 0; i < rows; ++i) f.positions.push_back({rng.Uniform(-3, 3), rng.Uniform(-3, 3)});
  f.velocities = RandomTensor({rows, 2}, rng);
  f.hidden = RandomTensor({rows, hidden_dim}, rng);
  return f;
}

Tensor PoolOracle(const PoolingParams& p, const PoolFixture& f) {
  const size_t rows = f.positions.size();
  Tensor out({rows, p.pool_dim});
  for (const auto& [begin, end] : f.groups) {
    for (size_t i = begin; i < end; ++i) {
      std::vector<GridNeighbor> nb;
      const double heading = std::atan2(f.velocities.at(i, 1), f.velocities.at(i, 0));
      for (size_t j = begin; j < end; ++j) {
        if (j == i) continue;
        GridNeighbor n{f.positions[j], {}};
        switch (p.kind) {
          case PoolingKind::kOccupancy:
            n.payload = {1};
            break;
          case PoolingKind::kDirectional: {
            Vec2 v{f.velocities.at(j, 0), f.velocities.at(j, 1)};
            if (p.grid.relative_velocity) v = v - Vec2{f.velocities.at(i, 0), f.velocities.at(i, 1)};
            if (p.grid.ego_aligned) v = v.Rotated(-heading);
            n.payload = {v.x, v.y};
            break;
          }
          case PoolingKind::kSocial:
            for (size_t k = 0; k < f.hidden.cols(); ++k) n.payload.push_back(f.hidden.at(j, k));
            break;
          case PoolingKind::kNone:
            break;
        }
        nb.push_back(std::move(n));
      }
      const Tensor grid = Rasterize(f.positions[i], nb, p.grid, p.channels, heading);
      Graph g;
      const Tensor e = EmbedGrid(g.Constant(grid), g.Constant(p.weight->value),
                                 g.Constant(p.bias->value))
                           .value();
      for (size_t k = 0; k < p.pool_dim; ++k) out.at(i, k) = e[k];
    }
  }
  return out;
}

TEST(PoolTest, MatchesRasterizeThenEmbedForEveryKind) {
  for (auto kind : {PoolingKind::kOccupancy, PoolingKind::kDirectional, PoolingKind::kSocial}) {
    for (bool aligned : {false, true}) {
      for (bool relative : {true, false}) {
        for (int draw = 0; draw < 10; ++draw) {
          Rng rng(100 + draw);
          GridSpec spec;
          spec.n_cells = 4;
          spec.cell_side = 1.0;
          spec.ego_aligned = aligned;
          spec.relative_velocity = relative;
          PoolingParams p = InitPoolingParams(kind, spec, 3, 5, rng);
          const PoolFixture f = RandomBatch(rng, 3);
          Graph g;
          const PoolingVars vars = BindPooling(g, p, false);
          const Var out = Pool(g, vars,
                               {f.positions, g.Constant(f.velocities), g.Constant(f.hidden), f.groups});
          const Tensor expect = PoolOracle(p, f);
          ASSERT_EQ(out.shape(), expect.shape());
          for (size_t i = 0; i < expect.size(); ++i) {
            EXPECT_NEAR(out.value()[i], expect[i], 1e-12)
                << ToString(kind) << " aligned " << aligned << " relative " << relative;
          }
        }
      }
    }
  }
}

TEST(PoolTest, NoneGivesZerosOfPoolDim) {
  Rng rng(5);
  PoolingParams p = InitPoolingParams(PoolingKind::kNone, DefaultGrid(), 3, 6, rng);
  EXPECT_EQ(p.ParameterCount(), 0u);
  const PoolFixture f = RandomBatch(rng, 3);
  Graph g;
  const Var out = Pool(g, BindPooling(g, p, false),
                       {f.positions, g.Constant(f.velocities), g.Constant(f.hidden), f.groups});
  EXPECT_EQ(out.value(), Tensor({8, 6}));
}

TEST(PoolTest, ScenesDoNotSeeEachOther) {
  Rng rng(6);
  GridSpec spec;
  PoolingParams p = InitPoolingParams(PoolingKind::kOccupancy, spec, 3, 4, rng);
  // Two rows at the same spot but in different scenes.
  const std::vector<Vec2> pos = {{0, 0}, {0.1, 0}};
  const std::pair<size_t, size_t> split[] = {{0, 1}, {1, 2}};
  const std::pair<size_t, size_t> joint[] = {{0, 2}};
  Graph g;
  const PoolingVars vars = BindPooling(g, p, false);
  const Var vel = g.Constant(Tensor({2, 2}));
  const Tensor alone = Pool(g, vars, {pos, vel, Var(), split}).value();
  const Tensor together = Pool(g, vars, {pos, vel, Var(), joint}).value();
  for (size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(alone.at(0, k), p.bias->value[k]);
    EXPECT_NE(together.at(0, k), p.bias->value[k]);
  }
}

TEST(PoolTest, GradientsMatchFiniteDifferences) {
  for (auto kind : {PoolingKind::kDirectional, PoolingKind::kSocial}) {
    Rng rng(7);
    GridSpec spec;
    spec.n_cells = 4;
    spec.cell_side = 1.0;
    spec.ego_aligned = true;
    PoolingParams p = InitPoolingParams(kind, spec, 3, 5, rng);
    const PoolFixture f = RandomBatch(rng, 3);
    const auto check = testing::CheckGradients(
        [&](Graph& g, std::span<const Var> x) {
          PoolingVars vars = BindPooling(g, p, false);
          vars.weight = x[2];
          vars.bias = x[3];
          return Sum(Square(Pool(g, vars, {f.positions, x[0], x[1], f.groups})));
        },
        {f.velocities, f.hidden, p.weight->value, p.bias->value});
    // Velocities also steer the heading, which is not differentiated; compare
    // weights, bias and social payload only.
    for (size_t k = kind == PoolingKind::kSocial ? 1 : 2; k < 4; ++k) {
      EXPECT_LT(testing::RelativeError(check.analytic[k].data(), check.numeric[k].data()), 1e-6)
          << ToString(kind) << " input " << k;
    }
  }
}

TEST(PoolTest, DirectionalVelocityGradientWithWorldAlignedGrid) {
  Rng rng(8);
  GridSpec spec;
  spec.n_cells = 4;
  spec.cell_side = 1.0;
  PoolingParams p = InitPoolingParams(PoolingKind::kDirectional, spec, 3, 5, rng);
  const PoolFixture f = RandomBatch(rng, 3);
  const auto check = testing::CheckGradients(
      [&](Graph& g, std::span<const Var> x) {
        return Sum(Square(Pool(g, BindPooling(g, p, false), {f.positions, x[0], Var(), f.groups})));
      },
      {f.velocities});
  EXPECT_LT(check.max_relative_error, 1e-6);
}

}  // namespace
}  // namespace urnn
