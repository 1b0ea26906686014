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

#include "urnn/cells.h"

#include <cmath>

namespace urnn {

std::string_view ToString(CellKind kind) {
  return kind == CellKind::kGru ? "gru" : "lstm";
}

CellKind ParseCellKind(std::string_view token) {
  if (token == "gru") return CellKind::kGru;
  if (token == "lstm") return CellKind::kLstm;
  throw ParseError("unknown cell kind '" + std::string(token) + "'");
}

size_t GateCount(CellKind kind) { return kind == CellKind::kGru ? 3 : 4; }

CellParams InitCellParams(CellKind kind, size_t input_dim, size_t hidden_dim,
                          Rng& rng, const std::string& name_prefix) {
  if (input_dim == 0 || hidden_dim == 0) {
    throw ShapeError("cell dimensions must be positive");
  }
  const size_t width = GateCount(kind) * hidden_dim;
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  auto uniform = [&](Shape shape) {
    Tensor t(std::move(shape));
    for (Scalar& v : t.data()) v = static_cast<Scalar>(rng.Uniform(-bound, bound));
    return t;
  };
  CellParams p;
  p.kind = kind;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.w_input = {name_prefix + ".w_input", uniform({input_dim, width}), {}};
  p.w_hidden = {name_prefix + ".w_hidden", uniform({hidden_dim, width}), {}};
  p.bias = {name_prefix + ".bias", uniform({width}), {}};
  if (kind == CellKind::kLstm) {
    for (size_t j = hidden_dim; j < 2 * hidden_dim; ++j) p.bias.value[j] = 1;
  }
  return p;
}

CellVars BindCell(Graph& graph, CellParams& params, bool trainable) {
  auto bind = [&](Parameter& p) { return trainable ? graph.Param(p) : graph.Frozen(p); };
  CellVars v{params.kind,     params.input_dim,       params.hidden_dim,
             bind(params.w_input), bind(params.w_hidden), bind(params.bias),
             {},              {}};
  if (params.kind == CellKind::kGru) {
    const size_t h = params.hidden_dim;
    v.w_hidden_rz = SliceCols(v.w_hidden, 0, 2 * h);
    v.w_hidden_n = SliceCols(v.w_hidden, 2 * h, 3 * h);
  }
  return v;
}

CellState ZeroState(Graph& graph, const CellVars& cell, size_t rows) {
  CellState s;
  s.h = graph.Constant(Tensor::Zeros({rows, cell.hidden_dim}));
  if (cell.kind == CellKind::kLstm) {
    s.c = graph.Constant(Tensor::Zeros({rows, cell.hidden_dim}));
  }
  return s;
}

CellState CellStep(const CellVars& cell, const CellState& state, Var input) {
  const size_t h = cell.hidden_dim;
  if (input.value().cols() != cell.input_dim) {
    throw ShapeError("cell_step: input " + input.value().ShapeString() +
                     " does not match input_dim " + std::to_string(cell.input_dim));
  }
  if (state.h.value().cols() != h || state.h.value().rows() != input.value().rows()) {
    throw ShapeError("cell_step: state " + state.h.value().ShapeString() +
                     " does not match hidden_dim " + std::to_string(h));
  }
  if ((cell.kind == CellKind::kLstm) != state.c.has_value()) {
    throw ShapeError("cell_step: cell state presence does not match cell kind");
  }

  const Var x_proj = AddRowBias(MatMul(input, cell.w_input), cell.bias);
  if (cell.kind == CellKind::kLstm) {
    const Var gates = Add(x_proj, MatMul(state.h, cell.w_hidden));
    const Var i = Sigmoid(SliceCols(gates, 0, h));
    const Var f = Sigmoid(SliceCols(gates, h, 2 * h));
    const Var g = Tanh(SliceCols(gates, 2 * h, 3 * h));
    const Var o = Sigmoid(SliceCols(gates, 3 * h, 4 * h));
    const Var c = Add(Mul(f, *state.c), Mul(i, g));
    return {Mul(o, Tanh(c)), c};
  }

  // GRU: r, z = sigma(x Wx + h Wh + b); n = tanh(x Wxn + (r*h) Whn + bn);
  // h' = (1 - z) * n + z * h.
  const Var rz = Sigmoid(Add(SliceCols(x_proj, 0, 2 * h), MatMul(state.h, cell.w_hidden_rz)));
  const Var r = SliceCols(rz, 0, h);
  const Var z = SliceCols(rz, h, 2 * h);
  const Var n = Tanh(Add(SliceCols(x_proj, 2 * h, 3 * h), MatMul(Mul(r, state.h), cell.w_hidden_n)));
  // (1 - z) * n + z * h == n + z * (h - n)
  const Var next = Add(n, Mul(z, Sub(state.h, n)));
  return {next, std::nullopt};
}

}  // namespace urnn
