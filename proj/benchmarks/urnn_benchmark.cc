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

#include <benchmark/benchmark.h>

#include <vector>

#include "urnn/baselines.h"
#include "urnn/cells.h"
#include "urnn/graph.h"
#include "urnn/metrics.h"
#include "urnn/model.h"
#include "urnn/scene.h"
#include "urnn/synth.h"

namespace urnn {
namespace {

Tensor Filled(Shape shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (Scalar& v : t.data()) v = static_cast<Scalar>(rng.Uniform(-1, 1));
  return t;
}

std::vector<PreparedScene> Prepared(size_t n) {
  Rng rng(1);
  std::vector<PreparedScene> out;
  for (const Scene& s : SynthScenes(n, rng)) out.push_back(PrepareScene(s, 9, 12));
  return out;
}

void BM_MatMul(benchmark::State& state) {
  const size_t n = static_cast<size_t>(state.range(0));
  Rng rng(1);
  const Tensor a = Filled({n, n}, rng), b = Filled({n, n}, rng);
  for (auto _ : state) {
    Graph g;
    benchmark::DoNotOptimize(MatMul(g.Constant(a), g.Constant(b)).value().data().data());
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(BM_MatMul)->RangeMultiplier(2)->Range(16, 256);

void BM_CellStep(benchmark::State& state) {
  const CellKind kind = state.range(0) ? CellKind::kLstm : CellKind::kGru;
  const size_t rows = 16, hidden = static_cast<size_t>(state.range(1));
  Rng rng(2);
  CellParams params = InitCellParams(kind, 32, hidden, rng);
  const Tensor x = Filled({rows, 32}, rng);
  for (auto _ : state) {
    Graph g;
    const CellVars cell = BindCell(g, params, true);
    CellState s = CellStep(cell, ZeroState(g, cell, rows), g.Constant(x));
    g.Backward(Sum(s.h));
    benchmark::DoNotOptimize(params.w_input.grad);
  }
  state.SetLabel(std::string(ToString(kind)));
}
BENCHMARK(BM_CellStep)->ArgsProduct({{0, 1}, {32, 128}});

// Forward and backward over a batch of 8 scenes, per pooling kind.
void BM_ForwardBackward(benchmark::State& state) {
  ModelConfig c;
  c.pooling = static_cast<PoolingKind>(state.range(0));
  c.hidden_dim = static_cast<size_t>(state.range(1));
  ForecastModel model = ForecastModel::Create(c, 3);
  const std::vector<PreparedScene> scenes = Prepared(8);
  std::vector<const PreparedScene*> ptrs;
  for (const auto& s : scenes) ptrs.push_back(&s);
  for (auto _ : state) {
    Graph g;
    const Rollout r = ForwardBatch(g, BindModel(g, model, true), ptrs);
    g.Backward(RolloutLoss(g, r, c.loss, ptrs).total);
  }
  state.SetLabel(PoolingLabel(c.pooling));
  state.SetItemsProcessed(state.iterations() * scenes.size());
}
BENCHMARK(BM_ForwardBackward)
    ->ArgsProduct({{0, 1, 2, 3}, {32, 128}})
    ->Unit(benchmark::kMillisecond);

void BM_PredictBatch(benchmark::State& state) {
  ForecastModel model = ForecastModel::Create(ModelConfig{}, 3);
  const std::vector<PreparedScene> scenes = Prepared(64);
  ModelPredictor predictor(model);
  for (auto _ : state) benchmark::DoNotOptimize(predictor.PredictBatch(scenes));
  state.SetItemsProcessed(state.iterations() * scenes.size());
}
BENCHMARK(BM_PredictBatch)->Unit(benchmark::kMillisecond);

void BM_Kalman(benchmark::State& state) {
  std::vector<Vec2> obs;
  for (int t = 0; t < 9; ++t) obs.push_back({0.5 * t, 0.1 * t * t});
  for (auto _ : state) benchmark::DoNotOptimize(PredictKalman(obs, 12));
}
BENCHMARK(BM_Kalman);

void BM_Collides(benchmark::State& state) {
  const size_t steps = static_cast<size_t>(state.range(0));
  std::vector<Vec2> a, b;
  for (int t = 0; t < 12; ++t) {
    a.push_back({0.5 * t, 0.0});
    b.push_back({0.5 * t, 1.0});
  }
  for (auto _ : state) benchmark::DoNotOptimize(Collides(a, b, 0.1, steps));
}
BENCHMARK(BM_Collides)->Arg(0)->Arg(4)->Arg(16);

void BM_Evaluate(benchmark::State& state) {
  Rng rng(4);
  const std::vector<Scene> scenes = SynthScenes(100, rng);
  ConstantVelocityPredictor cv;
  for (auto _ : state) benchmark::DoNotOptimize(Evaluate(cv, scenes));
  state.SetItemsProcessed(state.iterations() * scenes.size());
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace urnn

BENCHMARK_MAIN();
