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

#include <gtest/gtest.h>

#include <cmath>

#include "testing/oracles.h"

namespace urnn {
namespace {

using testing::RandomTensor;

constexpr size_t kE = 3;
constexpr size_t kH = 4;
constexpr size_t kRows = 2;

std::vector<Tensor> RandomSequence(size_t t, Rng& rng) {
  std::vector<Tensor> seq;
  for (size_t k = 0; k < t; ++k) seq.push_back(RandomTensor({kRows, kE}, rng));
  return seq;
}

std::vector<Var> Constants(Graph& g, const std::vector<Tensor>& seq) {
  std::vector<Var> out;
  for (const Tensor& t : seq) out.push_back(g.Constant(t));
  return out;
}

TEST(EncoderVariantTest, TokensRoundTrip) {
  for (auto v : {EncoderVariant::kPlain, EncoderVariant::kBi, EncoderVariant::kU,
                 EncoderVariant::kReversedU}) {
    EXPECT_EQ(ParseEncoderVariant(ToString(v)), v);
  }
  EXPECT_THROW(ParseEncoderVariant("transformer"), ParseError);
}

TEST(EmbedTest, ZeroWeightsGiveZeroEmbeddings) {
  Rng rng(1);
  EmbeddingParams p = InitEmbeddingParams(5, rng);
  p.weight.value.Fill(0);
  p.bias.value.Fill(0);
  Graph g;
  const auto vel = Constants(g, {RandomTensor({kRows, 2}, rng)});
  EXPECT_EQ(Embed(vel, BindEmbedding(g, p, false))[0].value(), Tensor({kRows, 5}));
}

TEST(EmbedTest, IdentityMapReturnsVelocities) {
  Rng rng(2);
  EmbeddingParams p = InitEmbeddingParams(2, rng);
  p.weight.value = Tensor::Matrix({{1, 0}, {0, 1}});
  p.bias.value.Fill(0);
  Graph g;
  const Tensor v = RandomTensor({kRows, 2}, rng);
  const auto vel = Constants(g, {v});
  EXPECT_EQ(Embed(vel, BindEmbedding(g, p, false))[0].value(), v);
}

TEST(EmbedTest, LengthAndDimPreserved) {
  Rng rng(3);
  EmbeddingParams p = InitEmbeddingParams(6, rng);
  Graph g;
  std::vector<Tensor> seq;
  for (int t = 0; t < 8; ++t) seq.push_back(RandomTensor({kRows, 2}, rng));
  const auto out = Embed(Constants(g, seq), BindEmbedding(g, p, false));
  ASSERT_EQ(out.size(), 8u);
  for (const Var& e : out) EXPECT_EQ(e.shape(), (Shape{kRows, 6}));
  EXPECT_THROW(Embed({}, BindEmbedding(g, p, false)), ShapeError);
}

TEST(EncodePlainTest, ZeroGruStaysZero) {
  Rng rng(4);
  CellParams cell = InitCellParams(CellKind::kGru, kE, kH, rng);
  for (Parameter* q : cell.Parameters()) q->value.Fill(0);
  Graph g;
  const auto seq = Constants(g, RandomSequence(3, rng));
  EXPECT_EQ(EncodePlain(seq, BindCell(g, cell, false)).h.value(), Tensor({kRows, kH}));
}

TEST(EncodePlainTest, LengthOneIsSingleStep) {
  Rng rng(5);
  CellParams cell = InitCellParams(CellKind::kLstm, kE, kH, rng);
  Graph g;
  const CellVars cv = BindCell(g, cell, false);
  const auto seq = Constants(g, RandomSequence(1, rng));
  EXPECT_EQ(EncodePlain(seq, cv).h.value(), CellStep(cv, ZeroState(g, cv, kRows), seq[0]).h.value());
  EXPECT_THROW(EncodePlain({}, cv), ShapeError);
}

TEST(EncodeBiTest, EqualsConcatOfTwoPlainPasses) {
  for (int draw = 0; draw < 100; ++draw) {
    Rng rng(1000 + draw);
    const CellKind kind = draw % 2 ? CellKind::kGru : CellKind::kLstm;
    CellParams fwd = InitCellParams(kind, kE, kH, rng);
    CellParams bwd = InitCellParams(kind, kE, kH, rng);
    const auto raw = RandomSequence(1 + draw % 9, rng);
    Graph g;
    const CellVars f = BindCell(g, fwd, false), b = BindCell(g, bwd, false);
    const auto seq = Constants(g, raw);
    const std::vector<Var> rev(seq.rbegin(), seq.rend());
    const Tensor expect = Concat(EncodePlain(seq, f).h, EncodePlain(rev, b).h, 1).value();
    const Encoding got = EncodeBi(seq, f, b);
    EXPECT_EQ(got.h.shape(), (Shape{kRows, 2 * kH}));
    EXPECT_EQ(got.h.value(), expect) << "draw " << draw;
  }
}

TEST(EncodeBiTest, PalindromeWithSharedWeightsHasEqualHalves) {
  Rng rng(6);
  CellParams cell = InitCellParams(CellKind::kGru, kE, kH, rng);
  auto raw = RandomSequence(2, rng);
  raw.push_back(raw[0]);
  Graph g;
  const CellVars c = BindCell(g, cell, false);
  const Tensor h = EncodeBi(Constants(g, raw), c, c).h.value();
  for (size_t r = 0; r < kRows; ++r) {
    for (size_t k = 0; k < kH; ++k) EXPECT_EQ(h.at(r, k), h.at(r, kH + k));
  }
}

TEST(EncodeBiTest, HiddenMismatchThrows) {
  Rng rng(7);
  CellParams a = InitCellParams(CellKind::kGru, kE, kH, rng);
  CellParams b = InitCellParams(CellKind::kGru, kE, kH + 1, rng);
  Graph g;
  const auto seq = Constants(g, RandomSequence(2, rng));
  EXPECT_THROW(EncodeBi(seq, BindCell(g, a, false), BindCell(g, b, false)), ShapeError);
}

// Hand-unrolled T=3:
//   hb3 = 0, hb2 = bwd(hb3, e3), hb1 = bwd(hb2, e2)
//   hf1 = 0, hf2 = fwd(hf1, [e1, hb1]), hf3 = fwd(hf2, [e2, hb2]),
//   hf4 = fwd(hf3, [e3, hb3])
TEST(EncodeUTest, LengthThreeTraceMatchesHandExpansion) {
  for (CellKind kind : {CellKind::kGru, CellKind::kLstm}) {
    Rng rng(8);
    CellParams bwd = InitCellParams(kind, kE, kH, rng);
    CellParams fwd = InitCellParams(kind, kE + kH, kH, rng);
    Graph g;
    const CellVars b = BindCell(g, bwd, false), f = BindCell(g, fwd, false);
    const auto e = Constants(g, RandomSequence(3, rng));
    const CellState hb3 = ZeroState(g, b, kRows);
    const CellState hb2 = CellStep(b, hb3, e[2]);
    const CellState hb1 = CellStep(b, hb2, e[1]);
    const CellState hf1 = ZeroState(g, f, kRows);
    const CellState hf2 = CellStep(f, hf1, Concat(e[0], hb1.h, 1));
    const CellState hf3 = CellStep(f, hf2, Concat(e[1], hb2.h, 1));
    const CellState hf4 = CellStep(f, hf3, Concat(e[2], hb3.h, 1));
    EXPECT_EQ(EncodeU(e, b, f).h.value(), hf4.h.value()) << ToString(kind);
  }
}

TEST(EncodeUTest, LengthOneEqualsPlainOnZeroPaddedInput) {
  Rng rng(9);
  CellParams bwd = InitCellParams(CellKind::kLstm, kE, kH, rng);
  CellParams fwd = InitCellParams(CellKind::kLstm, kE + kH, kH, rng);
  Graph g;
  const CellVars b = BindCell(g, bwd, false), f = BindCell(g, fwd, false);
  const auto e = Constants(g, RandomSequence(1, rng));
  const Var padded = Concat(e[0], g.Constant(Tensor({kRows, kH})), 1);
  const Var padded_seq[] = {padded};
  EXPECT_EQ(EncodeU(e, b, f).h.value(), EncodePlain(padded_seq, f).h.value());
  EXPECT_EQ(EncodeReversedU(e, b, f).h.value(), EncodeU(e, b, f).h.value());
}

TEST(EncodeUTest, ZeroBackwardWeightsEqualsPlainOnPaddedInput) {
  Rng rng(10);
  CellParams bwd = InitCellParams(CellKind::kGru, kE, kH, rng);
  for (Parameter* q : bwd.Parameters()) q->value.Fill(0);
  CellParams fwd = InitCellParams(CellKind::kGru, kE + kH, kH, rng);
  Graph g;
  const CellVars b = BindCell(g, bwd, false), f = BindCell(g, fwd, false);
  const auto e = Constants(g, RandomSequence(5, rng));
  std::vector<Var> padded;
  for (const Var& x : e) padded.push_back(Concat(x, g.Constant(Tensor({kRows, kH})), 1));
  EXPECT_EQ(EncodeU(e, b, f).h.value(), EncodePlain(padded, f).h.value());
}

TEST(EncodeUTest, DimensionMismatchThrows) {
  Rng rng(11);
  CellParams bwd = InitCellParams(CellKind::kGru, kE, kH, rng);
  CellParams fwd = InitCellParams(CellKind::kGru, kE, kH, rng);
  Graph g;
  const auto e = Constants(g, RandomSequence(3, rng));
  EXPECT_THROW(EncodeU(e, BindCell(g, bwd, false), BindCell(g, fwd, false)), ShapeError);
}

// With the forward cell blind to e_T, e_T reaches the encoding only
// through the backward states consumed at steps t < T.
TEST(EncodeUTest, LastInputReachesEarlierStepsThroughBackwardStates) {
  for (int draw = 0; draw < 10; ++draw) {
    Rng rng(12 + draw);
    CellParams bwd = InitCellParams(CellKind::kLstm, kE, kH, rng);
    CellParams fwd = InitCellParams(CellKind::kLstm, kE + kH, kH, rng);
    for (size_t k = 0; k < kE; ++k) {
      for (size_t j = 0; j < fwd.w_input.value.cols(); ++j) fwd.w_input.value.at(k, j) = 0;
    }
    const auto raw = RandomSequence(4, rng);
    const auto check = testing::CheckGradients(
        [&](Graph& g, std::span<const Var> x) {
          const CellVars b = BindCell(g, bwd, false), f = BindCell(g, fwd, false);
          std::vector<Var> e = Constants(g, raw);
          e.back() = x[0];
          // The final forward step sees a constant copy of e_T.
          std::vector<Var> hb(e.size() + 1);
          CellState s = ZeroState(g, b, kRows);
          hb[e.size()] = s.h;
          for (size_t t = e.size(); t-- > 1;) {
            s = CellStep(b, s, e[t]);
            hb[t] = s.h;
          }
          CellState hf = ZeroState(g, f, kRows);
          for (size_t t = 0; t < e.size(); ++t) {
            const Var et = t + 1 == e.size() ? g.Constant(raw.back()) : e[t];
            hf = CellStep(f, hf, Concat(et, hb[t + 1], 1));
          }
          return Sum(hf.h);
        },
        {raw.back()});
    double norm = 0;
    for (Scalar v : check.numeric[0].data()) norm += v * v;
    EXPECT_GT(norm, 1e-12);
    EXPECT_LT(check.max_relative_error, 1e-4);
  }
}

TEST(EncodeReversedUTest, EqualsUOnReversedInput) {
  for (int draw = 0; draw < 20; ++draw) {
    Rng rng(2000 + draw);
    CellParams bwd = InitCellParams(CellKind::kGru, kE, kH, rng);
    CellParams fwd = InitCellParams(CellKind::kGru, kE + kH, kH, rng);
    Graph g;
    const CellVars b = BindCell(g, bwd, false), f = BindCell(g, fwd, false);
    const auto e = Constants(g, RandomSequence(2 + draw % 7, rng));
    const std::vector<Var> rev(e.rbegin(), e.rend());
    EXPECT_EQ(EncodeReversedU(e, b, f).h.value(), EncodeU(rev, b, f).h.value());
  }
}

TEST(EncodeReversedUTest, DiffersFromUOnAtLeast95PercentOfDraws) {
  int differ = 0;
  for (int draw = 0; draw < 100; ++draw) {
    Rng rng(3000 + draw);
    CellParams bwd = InitCellParams(CellKind::kLstm, kE, kH, rng);
    CellParams fwd = InitCellParams(CellKind::kLstm, kE + kH, kH, rng);
    Graph g;
    const CellVars b = BindCell(g, bwd, false), f = BindCell(g, fwd, false);
    const auto e = Constants(g, RandomSequence(5, rng));
    differ += EncodeU(e, b, f).h.value() != EncodeReversedU(e, b, f).h.value();
  }
  EXPECT_GE(differ, 95);
}

TEST(EncoderParamsTest, DimsAndCounts) {
  Rng rng(13);
  auto make = [&](EncoderVariant v) { return InitEncoderParams(v, CellKind::kLstm, kE, kH, rng); };
  EXPECT_EQ(make(EncoderVariant::kPlain).EncodingDim(), kH);
  EXPECT_EQ(make(EncoderVariant::kBi).EncodingDim(), 2 * kH);
  EXPECT_EQ(make(EncoderVariant::kU).EncodingDim(), kH);
  EXPECT_EQ(make(EncoderVariant::kReversedU).EncodingDim(), kH);
  EXPECT_EQ(make(EncoderVariant::kU).ParameterCount(),
            make(EncoderVariant::kReversedU).ParameterCount());
  EXPECT_EQ(make(EncoderVariant::kPlain).ParameterCount(), 4 * (kE * kH + kH * kH + kH));
  EXPECT_EQ(make(EncoderVariant::kU).ParameterCount(),
            4 * (kE * kH + kH * kH + kH) + 4 * ((kE + kH) * kH + kH * kH + kH));
}

// Every variant: FD gradients of the encoding with respect to each e_t and
// every encoder weight, and every e_t has a nonzero influence.
TEST(EncoderGradientTest, AllVariantsMatchFiniteDifferences) {
  for (auto variant : {EncoderVariant::kPlain, EncoderVariant::kBi, EncoderVariant::kU,
                       EncoderVariant::kReversedU}) {
    for (CellKind kind : {CellKind::kGru, CellKind::kLstm}) {
      for (int draw = 0; draw < 10; ++draw) {
        Rng rng(4000 + draw);
        EncoderParams enc = InitEncoderParams(variant, kind, kE, kH, rng);
        std::vector<Tensor> inputs = RandomSequence(4, rng);
        const Tensor w = RandomTensor({kRows, enc.EncodingDim()}, rng);
        std::vector<Parameter*> params = enc.Parameters();
        for (Parameter* p : params) inputs.push_back(p->value);
        const auto check = testing::CheckGradients(
            [&](Graph& g, std::span<const Var> x) {
              EncoderVars vars = BindEncoder(g, enc, false);
              std::vector<Var> weights(x.begin() + 4, x.end());
              auto rebind = [&](CellVars& c, size_t at) {
                c.w_input = weights[at];
                c.w_hidden = weights[at + 1];
                c.bias = weights[at + 2];
                if (c.kind == CellKind::kGru) {
                  c.w_hidden_rz = SliceCols(c.w_hidden, 0, 2 * kH);
                  c.w_hidden_n = SliceCols(c.w_hidden, 2 * kH, 3 * kH);
                }
              };
              rebind(vars.first, 0);
              if (vars.second) rebind(*vars.second, 3);
              const Var seq[] = {x[0], x[1], x[2], x[3]};
              return Sum(Mul(Encode(seq, vars).h, g.Constant(w)));
            },
            inputs);
        EXPECT_LT(check.max_relative_error, 1e-4)
            << ToString(variant) << "/" << ToString(kind) << " draw " << draw;
        for (size_t t = 0; t < 4; ++t) {
          double norm = 0;
          for (Scalar v : check.numeric[t].data()) norm += v * v;
          EXPECT_GT(norm, 1e-16) << ToString(variant) << " e_" << t;
        }
      }
    }
  }
}

}  // namespace
}  // namespace urnn
