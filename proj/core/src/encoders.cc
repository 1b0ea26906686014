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

#include "urnn/encoders.h"

#include <algorithm>
#include <cmath>

namespace urnn {
namespace {

void RequireNonEmpty(std::span<const Var> seq, const char* op) {
  if (seq.empty()) throw ShapeError(std::string(op) + ": empty sequence");
}

CellState Unroll(std::span<const Var> embeds, const CellVars& cell) {
  Graph& g = *embeds.front().graph();
  CellState s = ZeroState(g, cell, embeds.front().value().rows());
  for (const Var& e : embeds) s = CellStep(cell, s, e);
  return s;
}

}  // namespace

std::string_view ToString(EncoderVariant variant) {
  switch (variant) {
    case EncoderVariant::kPlain:
      return "plain";
    case EncoderVariant::kBi:
      return "bi";
    case EncoderVariant::kU:
      return "u";
    case EncoderVariant::kReversedU:
      return "ur";
  }
  return "?";
}

EncoderVariant ParseEncoderVariant(std::string_view token) {
  if (token == "plain") return EncoderVariant::kPlain;
  if (token == "bi") return EncoderVariant::kBi;
  if (token == "u") return EncoderVariant::kU;
  if (token == "ur" || token == "reversed-u") return EncoderVariant::kReversedU;
  throw ParseError("unknown encoder variant '" + std::string(token) + "'");
}

EmbeddingParams InitEmbeddingParams(size_t e_dim, Rng& rng, const std::string& name_prefix) {
  if (e_dim == 0) throw ShapeError("embedding dimension must be positive");
  // Fan-in of 2.
  const double bound = 1.0 / std::sqrt(2.0);
  EmbeddingParams p{{name_prefix + ".weight", Tensor({2, e_dim}), {}},
                    {name_prefix + ".bias", Tensor({e_dim}), {}}};
  for (Scalar& v : p.weight.value.data()) v = static_cast<Scalar>(rng.Uniform(-bound, bound));
  for (Scalar& v : p.bias.value.data()) v = static_cast<Scalar>(rng.Uniform(-bound, bound));
  return p;
}

EmbeddingVars BindEmbedding(Graph& graph, EmbeddingParams& params, bool trainable) {
  if (trainable) return {graph.Param(params.weight), graph.Param(params.bias)};
  return {graph.Frozen(params.weight), graph.Frozen(params.bias)};
}

std::vector<Var> Embed(std::span<const Var> velocities, const EmbeddingVars& params) {
  RequireNonEmpty(velocities, "embed");
  std::vector<Var> out;
  out.reserve(velocities.size());
  for (const Var& v : velocities) out.push_back(AddRowBias(MatMul(v, params.weight), params.bias));
  return out;
}

Encoding EncodePlain(std::span<const Var> embeds, const CellVars& cell) {
  RequireNonEmpty(embeds, "encode_plain");
  return {Unroll(embeds, cell).h, EncoderVariant::kPlain};
}

Encoding EncodeBi(std::span<const Var> embeds, const CellVars& fwd_cell,
                  const CellVars& bwd_cell) {
  RequireNonEmpty(embeds, "encode_bi");
  if (fwd_cell.hidden_dim != bwd_cell.hidden_dim) {
    throw ShapeError("encode_bi: forward and backward hidden dims differ");
  }
  std::vector<Var> reversed(embeds.rbegin(), embeds.rend());
  const Var fwd = Unroll(embeds, fwd_cell).h;
  const Var bwd = Unroll(reversed, bwd_cell).h;
  return {Concat(fwd, bwd, 1), EncoderVariant::kBi};
}

Encoding EncodeU(std::span<const Var> embeds, const CellVars& bwd_cell,
                 const CellVars& fwd_cell) {
  RequireNonEmpty(embeds, "encode_u");
  const size_t e_dim = embeds.front().value().cols();
  if (bwd_cell.input_dim != e_dim ||
      fwd_cell.input_dim != e_dim + bwd_cell.hidden_dim) {
    throw ShapeError("encode_u: expected backward input " + std::to_string(e_dim) +
                     " and forward input " + std::to_string(e_dim + bwd_cell.hidden_dim));
  }
  Graph& g = *embeds.front().graph();
  const size_t rows = embeds.front().value().rows();
  const size_t steps = embeds.size();

  // summaries[t] holds h^b_{t+1} for the 0-based input index t, i.e. the
  // summary of inputs strictly after t. h^b_0 (which would consume e_1) is
  // never read by the forward pass and is not computed.
  std::vector<Var> summaries(steps);
  CellState back = ZeroState(g, bwd_cell, rows);
  summaries[steps - 1] = back.h;
  for (size_t t = steps - 1; t >= 1; --t) {
    back = CellStep(bwd_cell, back, embeds[t]);
    summaries[t - 1] = back.h;
  }

  CellState fwd = ZeroState(g, fwd_cell, rows);
  for (size_t t = 0; t < steps; ++t) {
    fwd = CellStep(fwd_cell, fwd, Concat(embeds[t], summaries[t], 1));
  }
  return {fwd.h, EncoderVariant::kU};
}

Encoding EncodeReversedU(std::span<const Var> embeds, const CellVars& bwd_cell,
                         const CellVars& fwd_cell) {
  std::vector<Var> reversed(embeds.rbegin(), embeds.rend());
  Encoding enc = EncodeU(reversed, bwd_cell, fwd_cell);
  enc.variant = EncoderVariant::kReversedU;
  return enc;
}

size_t EncoderParams::EncodingDim() const {
  return variant == EncoderVariant::kBi ? 2 * first.hidden_dim
                                        : (second ? second->hidden_dim : first.hidden_dim);
}

size_t EncoderParams::ParameterCount() const {
  return first.ParameterCount() + (second ? second->ParameterCount() : 0);
}

std::vector<Parameter*> EncoderParams::Parameters() {
  std::vector<Parameter*> out = first.Parameters();
  if (second) {
    for (Parameter* p : second->Parameters()) out.push_back(p);
  }
  return out;
}

EncoderParams InitEncoderParams(EncoderVariant variant, CellKind kind, size_t e_dim,
                                size_t hidden_dim, Rng& rng, const std::string& name_prefix) {
  EncoderParams p;
  p.variant = variant;
  switch (variant) {
    case EncoderVariant::kPlain:
      p.first = InitCellParams(kind, e_dim, hidden_dim, rng, name_prefix + ".fwd");
      break;
    case EncoderVariant::kBi:
      p.first = InitCellParams(kind, e_dim, hidden_dim, rng, name_prefix + ".fwd");
      p.second = InitCellParams(kind, e_dim, hidden_dim, rng, name_prefix + ".bwd");
      break;
    case EncoderVariant::kU:
    case EncoderVariant::kReversedU:
      p.first = InitCellParams(kind, e_dim, hidden_dim, rng, name_prefix + ".summary");
      p.second = InitCellParams(kind, e_dim + hidden_dim, hidden_dim, rng,
                                name_prefix + ".conditioned");
      break;
  }
  return p;
}

EncoderVars BindEncoder(Graph& graph, EncoderParams& params, bool trainable) {
  EncoderVars v{params.variant, BindCell(graph, params.first, trainable), std::nullopt};
  if (params.second) v.second = BindCell(graph, *params.second, trainable);
  return v;
}

Encoding Encode(std::span<const Var> embeds, const EncoderVars& encoder) {
  switch (encoder.variant) {
    case EncoderVariant::kPlain:
      return EncodePlain(embeds, encoder.first);
    case EncoderVariant::kBi:
      return EncodeBi(embeds, encoder.first, *encoder.second);
    case EncoderVariant::kU:
      return EncodeU(embeds, encoder.first, *encoder.second);
    case EncoderVariant::kReversedU:
      return EncodeReversedU(embeds, encoder.first, *encoder.second);
  }
  throw Error("unknown encoder variant");
}

}  // namespace urnn
