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

#ifndef URNN_ENCODERS_H_
#define URNN_ENCODERS_H_

#include <span>
#include <string_view>
#include <vector>

#include "urnn/cells.h"

namespace urnn {

enum class EncoderVariant { kPlain, kBi, kU, kReversedU };

// Tokens: plain, bi, u, ur.
std::string_view ToString(EncoderVariant variant);
EncoderVariant ParseEncoderVariant(std::string_view token);

// Single linear map from a 2-D velocity to the embedding space. Shared by
// the encoder and the decoder and across pedestrians.
struct EmbeddingParams {
  Parameter weight;  // 2 x e_dim
  Parameter bias;    // e_dim

  size_t dim() const { return bias.value.size(); }
};

EmbeddingParams InitEmbeddingParams(size_t e_dim, Rng& rng,
                                    const std::string& name_prefix = "embed");

struct EmbeddingVars {
  Var weight;
  Var bias;
};

EmbeddingVars BindEmbedding(Graph& graph, EmbeddingParams& params, bool trainable);

// velocities: one rows x 2 tensor per time step. Output keeps the length.
std::vector<Var> Embed(std::span<const Var> velocities, const EmbeddingVars& params);

struct Encoding {
  Var h;  // rows x hidden (rows x 2*hidden for Bi)
  EncoderVariant variant;
};

// Left-to-right unroll from the zero state; returns the final hidden state.
Encoding EncodePlain(std::span<const Var> embeds, const CellVars& cell);

// Independent forward and backward readings fused by concatenation:
// [forward final state, backward final state].
Encoding EncodeBi(std::span<const Var> embeds, const CellVars& fwd_cell,
                  const CellVars& bwd_cell);

// Asymmetrical bidirectional encoder over embeddings e_1..e_T.
// Backward pass from h^b_T = 0:   h^b_{t-1} = bwd(h^b_t, e_t)
// so h^b_t summarizes e_{t+1}..e_T. Forward pass from zero:
//   h^f_{t+1} = fwd(h^f_t, [e_t, h^b_t]),  t = 1..T
// and h^f_{T+1} is the encoding. bwd takes e_dim inputs, fwd takes
// e_dim + hidden_dim.
Encoding EncodeU(std::span<const Var> embeds, const CellVars& bwd_cell,
                 const CellVars& fwd_cell);

// EncodeU on the time-reversed sequence.
Encoding EncodeReversedU(std::span<const Var> embeds, const CellVars& bwd_cell,
                         const CellVars& fwd_cell);

// Cells owned by an encoder. `first` is the plain/forward (Bi) or the
// backward summarization cell (U, ReversedU); `second` is the Bi backward
// cell or the U conditioned forward cell.
struct EncoderParams {
  EncoderVariant variant = EncoderVariant::kPlain;
  CellParams first;
  std::optional<CellParams> second;

  size_t EncodingDim() const;
  size_t ParameterCount() const;
  std::vector<Parameter*> Parameters();
};

EncoderParams InitEncoderParams(EncoderVariant variant, CellKind kind, size_t e_dim,
                                size_t hidden_dim, Rng& rng,
                                const std::string& name_prefix = "encoder");

struct EncoderVars {
  EncoderVariant variant;
  CellVars first;
  std::optional<CellVars> second;
};

EncoderVars BindEncoder(Graph& graph, EncoderParams& params, bool trainable);

Encoding Encode(std::span<const Var> embeds, const EncoderVars& encoder);

}  // namespace urnn

#endif  // URNN_ENCODERS_H_
