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

#ifndef URNN_CELLS_H_
#define URNN_CELLS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "urnn/graph.h"

namespace urnn {

enum class CellKind { kGru, kLstm };

std::string_view ToString(CellKind kind);
CellKind ParseCellKind(std::string_view token);

// Number of stacked gate blocks: GRU (reset, update, candidate) = 3,
// LSTM (input, forget, cell, output) = 4.
size_t GateCount(CellKind kind);

// Weights of one recurrent cell. Gate blocks are stacked along the columns:
//   w_input  : input_dim  x (gates * hidden_dim)
//   w_hidden : hidden_dim x (gates * hidden_dim)
//   bias     : gates * hidden_dim
struct CellParams {
  CellKind kind = CellKind::kGru;
  size_t input_dim = 0;
  size_t hidden_dim = 0;
  Parameter w_input;
  Parameter w_hidden;
  Parameter bias;

  size_t ParameterCount() const {
    return w_input.value.size() + w_hidden.value.size() + bias.value.size();
  }
  std::vector<Parameter*> Parameters() { return {&w_input, &w_hidden, &bias}; }
};

// Weights uniform in [-1/sqrt(hidden), 1/sqrt(hidden)]; LSTM forget-gate
// bias starts at 1.
CellParams InitCellParams(CellKind kind, size_t input_dim, size_t hidden_dim,
                          Rng& rng, const std::string& name_prefix = "cell");

// Cell weights recorded into a graph.
struct CellVars {
  CellKind kind;
  size_t input_dim;
  size_t hidden_dim;
  Var w_input;
  Var w_hidden;
  Var bias;
  // GRU only: hidden weights split into the reset/update and candidate parts.
  Var w_hidden_rz;
  Var w_hidden_n;
};

// trainable=false records the weights as constants.
CellVars BindCell(Graph& graph, CellParams& params, bool trainable);

// Batched state: one row per sequence.
struct CellState {
  Var h;
  std::optional<Var> c;  // LSTM only
};

CellState ZeroState(Graph& graph, const CellVars& cell, size_t rows);

// One recurrence step. input is rows x input_dim, state rows x hidden_dim.
CellState CellStep(const CellVars& cell, const CellState& state, Var input);

}  // namespace urnn

#endif  // URNN_CELLS_H_
