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

#include "urnn/model.h"

#include <algorithm>
#include <cmath>

namespace urnn {
namespace {

constexpr Scalar kRhoScale = Scalar(0.99);

std::string CellLabel(CellKind kind) { return kind == CellKind::kGru ? "GRU" : "LSTM"; }

void RequireFinite(const Tensor& t, const char* what) {
  for (Scalar v : t.data()) {
    if (!std::isfinite(v)) throw NumericalError(std::string("non-finite ") + what);
  }
}

Tensor RowsOf(std::span<const Vec2> points) {
  Tensor t({points.size(), 2});
  for (size_t r = 0; r < points.size(); ++r) {
    t.at(r, 0) = static_cast<Scalar>(points[r].x);
    t.at(r, 1) = static_cast<Scalar>(points[r].y);
  }
  return t;
}

std::vector<Vec2> PointsOf(const Tensor& t) {
  std::vector<Vec2> out(t.rows());
  for (size_t r = 0; r < out.size(); ++r) out[r] = {t.at(r, 0), t.at(r, 1)};
  return out;
}

// Per-step ground truth and validity of a batch, in the local frames.
struct Targets {
  std::vector<Tensor> truth;
  std::vector<std::vector<bool>> mask;
};

Targets BatchTargets(const Rollout& rollout, std::span<const PreparedScene* const> scenes) {
  const size_t steps = rollout.positions.size();
  Targets out;
  for (size_t t = 0; t < steps; ++t) {
    Tensor truth({rollout.rows(), 2});
    std::vector<bool> mask(rollout.rows(), false);
    for (size_t s = 0; s < scenes.size(); ++s) {
      const PreparedScene& scene = *scenes[s];
      const auto [begin, end] = rollout.groups[s];
      for (size_t i = 0; i < end - begin; ++i) {
        const Vec2 p = scene.positions[i][scene.obs_len + t] - rollout.origins[s];
        truth.at(begin + i, 0) = static_cast<Scalar>(p.x);
        truth.at(begin + i, 1) = static_cast<Scalar>(p.y);
        mask[begin + i] = scene.observed[i][scene.obs_len + t];
      }
    }
    RequireFinite(truth, "ground truth");
    out.truth.push_back(std::move(truth));
    out.mask.push_back(std::move(mask));
  }
  return out;
}

Tensor MaskColumns(const std::vector<bool>& mask, size_t cols) {
  Tensor m({mask.size(), cols});
  for (size_t r = 0; r < mask.size(); ++r) {
    for (size_t c = 0; c < cols; ++c) m.at(r, c) = mask[r] ? 1 : 0;
  }
  return m;
}

size_t CountSet(const std::vector<bool>& mask) {
  return static_cast<size_t>(std::count(mask.begin(), mask.end(), true));
}

}  // namespace

std::string_view ToString(LossKind kind) { return kind == LossKind::kL2 ? "l2" : "nll"; }

LossKind ParseLossKind(std::string_view token) {
  if (token == "l2") return LossKind::kL2;
  if (token == "nll") return LossKind::kGaussianNll;
  throw Error("unknown loss '" + std::string(token) + "' (expected l2 or nll)");
}

void ModelConfig::Validate() const {
  if (obs_len < 2) throw Error("obs_len must be at least 2");
  if (pred_len < 1) throw Error("pred_len must be at least 1");
  if (e_dim == 0 || hidden_dim == 0 || pool_dim == 0) {
    throw Error("e_dim, hidden_dim and pool_dim must be positive");
  }
  if (grid.n_cells == 0 || grid.n_cells % 2 != 0) throw Error("grid n_cells must be even");
  if (!(grid.cell_side > 0)) throw Error("grid cell_side must be positive");
}

bool ModelConfig::operator==(const ModelConfig& o) const {
  return cell == o.cell && encoder == o.encoder && pooling == o.pooling && e_dim == o.e_dim &&
         hidden_dim == o.hidden_dim && pool_dim == o.pool_dim &&
         grid.n_cells == o.grid.n_cells && grid.cell_side == o.grid.cell_side &&
         grid.ego_aligned == o.grid.ego_aligned &&
         grid.relative_velocity == o.grid.relative_velocity && loss == o.loss &&
         obs_len == o.obs_len && pred_len == o.pred_len;
}

std::string ModelLabel(const ModelConfig& config) {
  const std::string cell = CellLabel(config.cell);
  std::string encoder;
  switch (config.encoder) {
    case EncoderVariant::kPlain:
      encoder = cell;
      break;
    case EncoderVariant::kBi:
      encoder = "Bi-" + cell;
      break;
    case EncoderVariant::kU:
      encoder = "U-" + cell;
      break;
    case EncoderVariant::kReversedU:
      encoder = "Reversed U-" + cell;
      break;
  }
  return encoder + " - " + cell;
}

std::string PoolingLabel(PoolingKind kind) {
  switch (kind) {
    case PoolingKind::kNone:
      return "None";
    case PoolingKind::kOccupancy:
      return "Occupancy";
    case PoolingKind::kDirectional:
      return "Directional";
    case PoolingKind::kSocial:
      return "Social";
  }
  return "?";
}

size_t HeadWidth(LossKind loss) { return loss == LossKind::kL2 ? 2 : 5; }

ForecastModel ForecastModel::Create(const ModelConfig& config, uint64_t seed) {
  config.Validate();
  Rng rng(seed);
  ForecastModel m;
  m.config_ = config;
  m.embedding_ = InitEmbeddingParams(config.e_dim, rng, "embed");
  m.encoder_ = InitEncoderParams(config.encoder, config.cell, config.e_dim, config.hidden_dim,
                                 rng, "encoder");
  const size_t dim = m.encoder_.EncodingDim();
  m.pooling_ = InitPoolingParams(config.pooling, config.grid, dim, config.pool_dim, rng, "pool");
  m.decoder_ = InitCellParams(config.cell, config.e_dim + config.pool_dim, dim, rng, "decoder");
  const size_t width = HeadWidth(config.loss);
  const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(dim));
  m.head_weight_ = {"head.weight", Tensor({dim, width}), {}};
  m.head_bias_ = {"head.bias", Tensor({width}), {}};
  for (Scalar& v : m.head_weight_.value.data()) v = static_cast<Scalar>(rng.Uniform(-bound, bound));
  for (Scalar& v : m.head_bias_.value.data()) v = static_cast<Scalar>(rng.Uniform(-bound, bound));
  return m;
}

std::vector<Parameter*> ForecastModel::Parameters() {
  std::vector<Parameter*> out = {&embedding_.weight, &embedding_.bias};
  for (Parameter* p : encoder_.Parameters()) out.push_back(p);
  for (Parameter* p : pooling_.Parameters()) out.push_back(p);
  for (Parameter* p : decoder_.Parameters()) out.push_back(p);
  out.push_back(&head_weight_);
  out.push_back(&head_bias_);
  return out;
}

std::vector<const Parameter*> ForecastModel::Parameters() const {
  std::vector<const Parameter*> out;
  for (Parameter* p : const_cast<ForecastModel*>(this)->Parameters()) out.push_back(p);
  return out;
}

size_t ForecastModel::ParameterCount() const {
  size_t n = 0;
  for (const Parameter* p : Parameters()) n += p->value.size();
  return n;
}

Parameter& ForecastModel::FindParameter(const std::string& name) {
  for (Parameter* p : Parameters()) {
    if (p->name == name) return *p;
  }
  throw IntegrityError("model has no parameter named '" + name + "'");
}

ModelVars BindModel(Graph& graph, ForecastModel& model, bool trainable) {
  auto bind = [&](Parameter& p) { return trainable ? graph.Param(p) : graph.Frozen(p); };
  return {&model.config(),
          BindEmbedding(graph, model.embedding(), trainable),
          BindEncoder(graph, model.encoder(), trainable),
          BindPooling(graph, model.pooling(), trainable),
          BindCell(graph, model.decoder(), trainable),
          bind(model.head_weight()),
          bind(model.head_bias())};
}

Rollout ForwardBatch(Graph& graph, const ModelVars& vars,
                     std::span<const PreparedScene* const> scenes) {
  const ModelConfig& config = *vars.config;
  if (scenes.empty()) throw Error("forward: empty batch");
  Rollout out;
  size_t rows = 0;
  for (const PreparedScene* scene : scenes) {
    if (scene->obs_len != config.obs_len || scene->pred_len != config.pred_len) {
      throw ShapeError("forward: scene horizon does not match the model configuration");
    }
    if (scene->num_peds() == 0) throw ShapeError("forward: scene without pedestrians");
    out.groups.emplace_back(rows, rows + scene->num_peds());
    out.origins.push_back(scene->positions[0][config.obs_len - 1]);
    rows += scene->num_peds();
  }

  // Observed velocities, one rows x 2 constant per step.
  const size_t obs_steps = config.obs_len - 1;
  std::vector<Var> velocities;
  for (size_t t = 0; t < obs_steps; ++t) {
    std::vector<Vec2> v;
    v.reserve(rows);
    for (const PreparedScene* scene : scenes) {
      for (const auto& track : scene->positions) v.push_back(track[t + 1] - track[t]);
    }
    Tensor vt = RowsOf(v);
    RequireFinite(vt, "observed velocity");
    velocities.push_back(graph.Constant(std::move(vt)));
  }
  const std::vector<Var> embeds = Embed(velocities, vars.embedding);
  const Encoding encoding = Encode(embeds, vars.encoder);
  out.encoding = encoding.h;
  out.initial_hidden = encoding.h;

  std::vector<Vec2> current;
  current.reserve(rows);
  for (size_t s = 0; s < scenes.size(); ++s) {
    for (const auto& track : scenes[s]->positions) {
      out.last_observed.push_back(track[config.obs_len - 1]);
      current.push_back(track[config.obs_len - 1] - out.origins[s]);
    }
  }
  Var position = graph.Constant(RowsOf(current));
  Var velocity = velocities.back();
  CellState state;
  state.h = encoding.h;
  if (config.cell == CellKind::kLstm) {
    state.c = graph.Constant(Tensor::Zeros({rows, vars.decoder.hidden_dim}));
  }
  for (size_t t = 0; t < config.pred_len; ++t) {
    const Var e = Embed(std::span<const Var>(&velocity, 1), vars.embedding).front();
    const std::vector<Vec2> here = PointsOf(position.value());
    const Var interaction =
        Pool(graph, vars.pooling, {here, velocity, state.h, out.groups});
    state = CellStep(vars.decoder, state, Concat(e, interaction, 1));
    const Var head = AddRowBias(MatMul(state.h, vars.head_weight), vars.head_bias);
    Var step = head;
    if (config.loss == LossKind::kGaussianNll) {
      step = SliceCols(head, 0, 2);
      out.spreads.push_back(SliceCols(head, 2, 5));
    }
    position = Add(position, step);
    velocity = step;
    out.positions.push_back(position);
    out.steps.push_back(step);
  }
  return out;
}

std::vector<ScenePrediction> ExtractPredictions(const Rollout& rollout) {
  std::vector<ScenePrediction> out(rollout.groups.size());
  for (size_t s = 0; s < rollout.groups.size(); ++s) {
    const auto [begin, end] = rollout.groups[s];
    out[s].positions.assign(end - begin, {});
    for (size_t r = begin; r < end; ++r) {
      // Accumulate absolute steps so a zero step leaves a position exact.
      Vec2 p = rollout.last_observed[r];
      for (const Var& step : rollout.steps) {
        p = p + Vec2{step.value().at(r, 0), step.value().at(r, 1)};
        out[s].positions[r - begin].push_back(p);
      }
    }
  }
  return out;
}

ScenePrediction ForwardScene(ForecastModel& model, const PreparedScene& scene) {
  Graph graph;
  const ModelVars vars = BindModel(graph, model, false);
  const PreparedScene* one = &scene;
  return ExtractPredictions(ForwardBatch(graph, vars, std::span(&one, 1))).front();
}

LossSum L2LossSum(Graph& graph, std::span<const Var> predicted, std::span<const Tensor> truth,
                  std::span<const std::vector<bool>> mask) {
  if (predicted.size() != truth.size() || predicted.size() != mask.size()) {
    throw ShapeError("l2 loss: step counts differ");
  }
  LossSum out;
  for (size_t t = 0; t < predicted.size(); ++t) {
    RequireFinite(truth[t], "ground truth");
    const Var diff = Sub(predicted[t], graph.Constant(truth[t]));
    const Var term = Sum(Mul(Square(diff), graph.Constant(MaskColumns(mask[t], 2))));
    out.total = out.total.valid() ? Add(out.total, term) : term;
    out.count += CountSet(mask[t]);
  }
  if (!out.total.valid()) throw ShapeError("l2 loss: no steps");
  return out;
}

LossSum GaussianNllSum(Graph& graph, std::span<const Var> predicted,
                       std::span<const Var> spreads, std::span<const Tensor> truth,
                       std::span<const std::vector<bool>> mask) {
  if (predicted.size() != truth.size() || predicted.size() != mask.size() ||
      spreads.size() != predicted.size()) {
    throw ShapeError("nll loss: step counts differ");
  }
  const Scalar log_two_pi = static_cast<Scalar>(std::log(2.0 * M_PI));
  LossSum out;
  for (size_t t = 0; t < predicted.size(); ++t) {
    RequireFinite(truth[t], "ground truth");
    const Var diff = Sub(graph.Constant(truth[t]), predicted[t]);
    const Var sx = SliceCols(spreads[t], 0, 1);
    const Var sy = SliceCols(spreads[t], 1, 2);
    const Var rho = Scale(Tanh(SliceCols(spreads[t], 2, 3)), kRhoScale);
    const Var zx = Mul(SliceCols(diff, 0, 1), Exp(Scale(sx, -1)));
    const Var zy = Mul(SliceCols(diff, 1, 2), Exp(Scale(sy, -1)));
    const Var one_minus = AddScalar(Scale(Square(rho), -1), 1);
    const Var quad = Sub(Add(Square(zx), Square(zy)), Scale(Mul(rho, Mul(zx, zy)), 2));
    Var point = Add(Add(sx, sy), Scale(Log(one_minus), Scalar(0.5)));
    point = Add(point, Div(quad, Scale(one_minus, 2)));
    point = AddScalar(point, log_two_pi);
    const Var term = Sum(Mul(point, graph.Constant(MaskColumns(mask[t], 1))));
    out.total = out.total.valid() ? Add(out.total, term) : term;
    out.count += CountSet(mask[t]);
  }
  if (!out.total.valid()) throw ShapeError("nll loss: no steps");
  return out;
}

LossSum RolloutLoss(Graph& graph, const Rollout& rollout, LossKind kind,
                    std::span<const PreparedScene* const> scenes) {
  const Targets targets = BatchTargets(rollout, scenes);
  LossSum loss = kind == LossKind::kL2
                     ? L2LossSum(graph, rollout.positions, targets.truth, targets.mask)
                     : GaussianNllSum(graph, rollout.positions, rollout.spreads, targets.truth,
                                      targets.mask);
  if (!std::isfinite(loss.total.value()[0])) throw NumericalError("loss is not finite");
  return loss;
}

double EvaluateLoss(ForecastModel& model, std::span<const PreparedScene> scenes,
                    size_t batch_size) {
  if (scenes.empty()) throw Error("evaluate loss: no scenes");
  batch_size = std::max<size_t>(batch_size, 1);
  double total = 0.0;
  size_t count = 0;
  for (size_t begin = 0; begin < scenes.size(); begin += batch_size) {
    const size_t end = std::min(scenes.size(), begin + batch_size);
    std::vector<const PreparedScene*> batch;
    for (size_t i = begin; i < end; ++i) batch.push_back(&scenes[i]);
    Graph graph;
    const ModelVars vars = BindModel(graph, model, false);
    const Rollout rollout = ForwardBatch(graph, vars, batch);
    const LossSum loss = RolloutLoss(graph, rollout, model.config().loss, batch);
    total += loss.total.value()[0];
    count += loss.count;
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

ScenePrediction ModelPredictor::Predict(const PreparedScene& scene) {
  return ForwardScene(model_, scene);
}

std::vector<ScenePrediction> ModelPredictor::PredictBatch(std::span<const PreparedScene> scenes) {
  std::vector<ScenePrediction> out;
  out.reserve(scenes.size());
  const size_t step = std::max<size_t>(batch_size_, 1);
  for (size_t begin = 0; begin < scenes.size(); begin += step) {
    const size_t end = std::min(scenes.size(), begin + step);
    std::vector<const PreparedScene*> batch;
    for (size_t i = begin; i < end; ++i) batch.push_back(&scenes[i]);
    Graph graph;
    const ModelVars vars = BindModel(graph, model_, false);
    for (auto& p : ExtractPredictions(ForwardBatch(graph, vars, batch))) {
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace urnn
