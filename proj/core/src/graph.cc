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

#include "urnn/graph.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <memory>

namespace urnn {
namespace {

using RowMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

ConstMap View(const Tensor& t) {
  return ConstMap(t.data().data(), t.rows(), t.cols());
}
MutMap View(Tensor& t) { return MutMap(t.data().data(), t.rows(), t.cols()); }

void RequireSameShape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.ShapeString() +
                     " vs " + b.ShapeString());
  }
}

void RequireSameGraph(Var a, Var b) {
  if (a.graph() != b.graph()) throw Error("operands belong to different graphs");
}

Scalar SigmoidValue(Scalar x) {
  if (x >= 0) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

// Unary op with gradient expressed through input and output values.
template <typename Fwd, typename Deriv>
Var Unary(Var a, Fwd fwd, Deriv deriv) {
  Graph& g = *a.graph();
  const Tensor& x = a.value();
  Tensor out(x.shape());
  for (size_t i = 0; i < x.size(); ++i) out[i] = fwd(x[i]);
  const uint32_t ia = a.id();
  Var v[] = {a};
  // Output id is known only after recording, so the closure reads it lazily.
  auto self = std::make_shared<uint32_t>(0);
  Var result = g.Record(std::move(out), v, [ia, self, deriv](Graph& g, const Tensor& gout) {
    const Tensor& x = g.value(ia);
    const Tensor& y = g.value(*self);
    Tensor& gx = g.GradBuffer(ia);
    for (size_t i = 0; i < x.size(); ++i) gx[i] += gout[i] * deriv(x[i], y[i]);
  });
  *self = result.id();
  return result;
}

}  // namespace

const Tensor& Var::value() const { return graph_->value(id_); }
bool Var::requires_grad() const { return graph_->requires_grad(id_); }
const Tensor* Var::grad() const { return graph_->grad(id_); }

Var Graph::Constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.is_leaf = true;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<uint32_t>(nodes_.size() - 1));
}

Var Graph::Leaf(Tensor value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.is_leaf = true;
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<uint32_t>(nodes_.size() - 1));
}

Var Graph::Param(Parameter& param) {
  Node n;
  n.value = param.value;
  n.is_leaf = true;
  n.requires_grad = true;
  n.param = &param;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<uint32_t>(nodes_.size() - 1));
}

Var Graph::Record(Tensor value, std::span<const Var> inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (const Var& in : inputs) {
    if (in.graph() != this) throw Error("operand recorded in a different graph");
    if (nodes_[in.id()].requires_grad) n.requires_grad = true;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<uint32_t>(nodes_.size() - 1));
}

Tensor& Graph::GradBuffer(uint32_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Tensor::Zeros(n.value.shape());
  return n.grad;
}

void Graph::Backward(Var root, bool accumulate_params) {
  if (root.graph() != this) throw Error("backward root belongs to a different graph");
  if (nodes_[root.id()].value.size() != 1) {
    throw ShapeError("backward requires a scalar root, got " +
                     nodes_[root.id()].value.ShapeString());
  }
  if (!nodes_[root.id()].requires_grad) return;
  for (Node& n : nodes_) {
    if (!n.is_leaf || n.param != nullptr) n.grad = Tensor();
  }
  GradBuffer(root.id())[0] += 1;
  for (int64_t i = root.id(); i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
    n.backward(*this, n.grad);
  }
  if (accumulate_params) AccumulateParamGrads();
}

void Graph::AccumulateParamGrads() const {
  for (const Node& n : nodes_) {
    if (n.param == nullptr || n.grad.empty()) continue;
    if (!n.param->grad) n.param->ZeroGrad();
    Tensor& dst = *n.param->grad;
    for (size_t i = 0; i < dst.size(); ++i) dst[i] += n.grad[i];
  }
}

Var MatMul(Var a, Var b) {
  RequireSameGraph(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rank() > 2 || bv.rank() != 2 || av.cols() != bv.rows()) {
    throw ShapeError("matmul: incompatible shapes " + av.ShapeString() + " x " +
                     bv.ShapeString());
  }
  const Shape out_shape =
      av.rank() == 1 ? Shape{bv.cols()} : Shape{av.rows(), bv.cols()};
  Tensor out(out_shape);
  View(out).noalias() = View(av) * View(bv);
  const uint32_t ia = a.id(), ib = b.id();
  Var in[] = {a, b};
  return a.graph()->Record(std::move(out), in, [ia, ib](Graph& g, const Tensor& gout) {
    if (g.requires_grad(ia)) {
      View(g.GradBuffer(ia)).noalias() += View(gout) * View(g.value(ib)).transpose();
    }
    if (g.requires_grad(ib)) {
      View(g.GradBuffer(ib)).noalias() += View(g.value(ia)).transpose() * View(gout);
    }
  });
}

Var Elementwise(ElementwiseOp op, std::span<const Var> inputs) {
  const bool binary = op == ElementwiseOp::kAdd || op == ElementwiseOp::kMul;
  if (inputs.size() != (binary ? 2u : 1u)) {
    throw ShapeError("elementwise: wrong operand count");
  }
  switch (op) {
    case ElementwiseOp::kAdd:
      return Add(inputs[0], inputs[1]);
    case ElementwiseOp::kMul:
      return Mul(inputs[0], inputs[1]);
    case ElementwiseOp::kTanh:
      return Tanh(inputs[0]);
    case ElementwiseOp::kSigmoid:
      return Sigmoid(inputs[0]);
    case ElementwiseOp::kRelu:
      return Relu(inputs[0]);
  }
  throw Error("unknown elementwise op");
}

Var Add(Var a, Var b) {
  RequireSameGraph(a, b);
  RequireSameShape("add", a.value(), b.value());
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  const uint32_t ia = a.id(), ib = b.id();
  Var in[] = {a, b};
  return a.graph()->Record(std::move(out), in, [ia, ib](Graph& g, const Tensor& gout) {
    for (uint32_t id : {ia, ib}) {
      if (!g.requires_grad(id)) continue;
      Tensor& gx = g.GradBuffer(id);
      for (size_t i = 0; i < gx.size(); ++i) gx[i] += gout[i];
    }
  });
}

Var Sub(Var a, Var b) {
  RequireSameGraph(a, b);
  RequireSameShape("sub", a.value(), b.value());
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  const uint32_t ia = a.id(), ib = b.id();
  Var in[] = {a, b};
  return a.graph()->Record(std::move(out), in, [ia, ib](Graph& g, const Tensor& gout) {
    if (g.requires_grad(ia)) {
      Tensor& ga = g.GradBuffer(ia);
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += gout[i];
    }
    if (g.requires_grad(ib)) {
      Tensor& gb = g.GradBuffer(ib);
      for (size_t i = 0; i < gb.size(); ++i) gb[i] -= gout[i];
    }
  });
}

Var Mul(Var a, Var b) {
  RequireSameGraph(a, b);
  RequireSameShape("mul", a.value(), b.value());
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  const uint32_t ia = a.id(), ib = b.id();
  Var in[] = {a, b};
  return a.graph()->Record(std::move(out), in, [ia, ib](Graph& g, const Tensor& gout) {
    // a and b may be the same node; both terms accumulate.
    if (g.requires_grad(ia)) {
      const Tensor& bv = g.value(ib);
      Tensor& ga = g.GradBuffer(ia);
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += gout[i] * bv[i];
    }
    if (g.requires_grad(ib)) {
      const Tensor& av = g.value(ia);
      Tensor& gb = g.GradBuffer(ib);
      for (size_t i = 0; i < gb.size(); ++i) gb[i] += gout[i] * av[i];
    }
  });
}

Var Div(Var a, Var b) {
  RequireSameGraph(a, b);
  RequireSameShape("div", a.value(), b.value());
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (size_t i = 0; i < out.size(); ++i) out[i] /= bv[i];
  const uint32_t ia = a.id(), ib = b.id();
  Var in[] = {a, b};
  return a.graph()->Record(std::move(out), in, [ia, ib](Graph& g, const Tensor& gout) {
    const Tensor& av = g.value(ia);
    const Tensor& bv = g.value(ib);
    if (g.requires_grad(ia)) {
      Tensor& ga = g.GradBuffer(ia);
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += gout[i] / bv[i];
    }
    if (g.requires_grad(ib)) {
      Tensor& gb = g.GradBuffer(ib);
      for (size_t i = 0; i < gb.size(); ++i) gb[i] -= gout[i] * av[i] / (bv[i] * bv[i]);
    }
  });
}

Var Tanh(Var a) {
  return Unary(
      a, [](Scalar x) { return std::tanh(x); },
      [](Scalar, Scalar y) { return Scalar(1) - y * y; });
}

Var Sigmoid(Var a) {
  return Unary(
      a, [](Scalar x) { return SigmoidValue(x); },
      [](Scalar, Scalar y) { return y * (Scalar(1) - y); });
}

Var Relu(Var a) {
  return Unary(
      a, [](Scalar x) { return x > 0 ? x : Scalar(0); },
      [](Scalar x, Scalar) { return x > 0 ? Scalar(1) : Scalar(0); });
}

Var Exp(Var a) {
  return Unary(
      a, [](Scalar x) { return std::exp(x); }, [](Scalar, Scalar y) { return y; });
}

Var Log(Var a) {
  return Unary(
      a, [](Scalar x) { return std::log(x); },
      [](Scalar x, Scalar) { return Scalar(1) / x; });
}

Var Square(Var a) {
  return Unary(
      a, [](Scalar x) { return x * x; }, [](Scalar x, Scalar) { return 2 * x; });
}

Var Scale(Var a, Scalar s) {
  return Unary(
      a, [s](Scalar x) { return s * x; }, [s](Scalar, Scalar) { return s; });
}

Var AddScalar(Var a, Scalar s) {
  return Unary(
      a, [s](Scalar x) { return x + s; }, [](Scalar, Scalar) { return Scalar(1); });
}

Var AddRowBias(Var a, Var bias) {
  RequireSameGraph(a, bias);
  const Tensor& av = a.value();
  const Tensor& bv = bias.value();
  if (bv.size() != av.cols()) {
    throw ShapeError("add_row_bias: bias " + bv.ShapeString() + " vs input " +
                     av.ShapeString());
  }
  Tensor out = av;
  const size_t rows = av.rows(), cols = av.cols();
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) out[r * cols + c] += bv[c];
  }
  const uint32_t ia = a.id(), ib = bias.id();
  Var in[] = {a, bias};
  return a.graph()->Record(
      std::move(out), in, [ia, ib, rows, cols](Graph& g, const Tensor& gout) {
        if (g.requires_grad(ia)) {
          Tensor& ga = g.GradBuffer(ia);
          for (size_t i = 0; i < ga.size(); ++i) ga[i] += gout[i];
        }
        if (g.requires_grad(ib)) {
          Tensor& gb = g.GradBuffer(ib);
          for (size_t r = 0; r < rows; ++r) {
            for (size_t c = 0; c < cols; ++c) gb[c] += gout[r * cols + c];
          }
        }
      });
}

Var Concat(Var a, Var b, size_t axis) {
  RequireSameGraph(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rank() != bv.rank() || av.rank() == 0 || av.rank() > 2 ||
      axis >= av.rank()) {
    throw ShapeError("concat: unsupported shapes " + av.ShapeString() + " and " +
                     bv.ShapeString() + " on axis " + std::to_string(axis));
  }
  if (av.rank() == 1 || axis == 0) {
    if (av.rank() == 2 && av.cols() != bv.cols()) {
      throw ShapeError("concat: column extents differ " + av.ShapeString() +
                       " vs " + bv.ShapeString());
    }
    Shape shape = av.shape();
    shape[0] += bv.shape()[0];
    std::vector<Scalar> data(av.data().begin(), av.data().end());
    data.insert(data.end(), bv.data().begin(), bv.data().end());
    const size_t na = av.size();
    const uint32_t ia = a.id(), ib = b.id();
    Var in[] = {a, b};
    return a.graph()->Record(Tensor(shape, std::move(data)), in,
                             [ia, ib, na](Graph& g, const Tensor& gout) {
                               if (g.requires_grad(ia)) {
                                 Tensor& ga = g.GradBuffer(ia);
                                 for (size_t i = 0; i < ga.size(); ++i) ga[i] += gout[i];
                               }
                               if (g.requires_grad(ib)) {
                                 Tensor& gb = g.GradBuffer(ib);
                                 for (size_t i = 0; i < gb.size(); ++i) gb[i] += gout[na + i];
                               }
                             });
  }
  if (av.rows() != bv.rows()) {
    throw ShapeError("concat: row extents differ " + av.ShapeString() + " vs " +
                     bv.ShapeString());
  }
  const size_t rows = av.rows(), ca = av.cols(), cb = bv.cols(), cols = ca + cb;
  Tensor out({rows, cols});
  for (size_t r = 0; r < rows; ++r) {
    std::copy_n(&av.data()[r * ca], ca, &out[r * cols]);
    std::copy_n(&bv.data()[r * cb], cb, &out[r * cols + ca]);
  }
  const uint32_t ia = a.id(), ib = b.id();
  Var in[] = {a, b};
  return a.graph()->Record(
      std::move(out), in, [ia, ib, rows, ca, cb, cols](Graph& g, const Tensor& gout) {
        if (g.requires_grad(ia)) {
          Tensor& ga = g.GradBuffer(ia);
          for (size_t r = 0; r < rows; ++r)
            for (size_t c = 0; c < ca; ++c) ga[r * ca + c] += gout[r * cols + c];
        }
        if (g.requires_grad(ib)) {
          Tensor& gb = g.GradBuffer(ib);
          for (size_t r = 0; r < rows; ++r)
            for (size_t c = 0; c < cb; ++c) gb[r * cb + c] += gout[r * cols + ca + c];
        }
      });
}

Var SliceCols(Var a, size_t begin, size_t end) {
  const Tensor& av = a.value();
  if (begin >= end || end > av.cols()) {
    throw ShapeError("slice: range [" + std::to_string(begin) + "," +
                     std::to_string(end) + ") out of bounds for " + av.ShapeString());
  }
  const size_t rows = av.rows(), cols = av.cols(), w = end - begin;
  const Shape shape = av.rank() == 1 ? Shape{w} : Shape{rows, w};
  Tensor out(shape);
  for (size_t r = 0; r < rows; ++r) {
    std::copy_n(&av.data()[r * cols + begin], w, &out[r * w]);
  }
  const uint32_t ia = a.id();
  Var in[] = {a};
  return a.graph()->Record(
      std::move(out), in, [ia, rows, cols, begin, w](Graph& g, const Tensor& gout) {
        Tensor& ga = g.GradBuffer(ia);
        for (size_t r = 0; r < rows; ++r)
          for (size_t c = 0; c < w; ++c) ga[r * cols + begin + c] += gout[r * w + c];
      });
}

Var Reshape(Var a, Shape shape) {
  Tensor out = a.value().Reshaped(std::move(shape));
  const uint32_t ia = a.id();
  Var in[] = {a};
  return a.graph()->Record(std::move(out), in, [ia](Graph& g, const Tensor& gout) {
    Tensor& ga = g.GradBuffer(ia);
    for (size_t i = 0; i < ga.size(); ++i) ga[i] += gout[i];
  });
}

Var Sum(Var a) {
  Scalar total = 0;
  for (Scalar v : a.value().data()) total += v;
  const uint32_t ia = a.id();
  Var in[] = {a};
  return a.graph()->Record(Tensor({1}, {total}), in, [ia](Graph& g, const Tensor& gout) {
    Tensor& ga = g.GradBuffer(ia);
    for (size_t i = 0; i < ga.size(); ++i) ga[i] += gout[0];
  });
}

Var Mean(Var a) { return Scale(Sum(a), Scalar(1) / static_cast<Scalar>(a.value().size())); }

Var GridLinear(Var payload, std::span<const GridEntry> entries, size_t egos, Var w) {
  RequireSameGraph(payload, w);
  const Tensor& pv = payload.value();
  const Tensor& wv = w.value();
  const size_t ch = pv.cols();
  const size_t out_dim = wv.cols();
  for (const GridEntry& e : entries) {
    if (e.ego >= egos || e.source >= pv.rows() || (e.cell + 1) * ch > wv.rows()) {
      throw ShapeError("grid_linear: entry out of range for payload " +
                       pv.ShapeString() + " and weight " + wv.ShapeString());
    }
  }
  Tensor out({egos, out_dim});
  for (const GridEntry& e : entries) {
    Scalar* o = &out[e.ego * out_dim];
    for (size_t k = 0; k < ch; ++k) {
      const Scalar s = e.weight * pv[e.source * ch + k];
      if (s == 0) continue;
      const Scalar* wr = &wv.data()[(e.cell * ch + k) * out_dim];
      for (size_t j = 0; j < out_dim; ++j) o[j] += s * wr[j];
    }
  }
  std::vector<GridEntry> kept(entries.begin(), entries.end());
  const uint32_t ip = payload.id(), iw = w.id();
  Var in[] = {payload, w};
  return payload.graph()->Record(
      std::move(out), in,
      [ip, iw, ch, out_dim, kept = std::move(kept)](Graph& g, const Tensor& gout) {
        const Tensor& pv = g.value(ip);
        const Tensor& wv = g.value(iw);
        const bool need_p = g.requires_grad(ip);
        const bool need_w = g.requires_grad(iw);
        Tensor* gp = need_p ? &g.GradBuffer(ip) : nullptr;
        Tensor* gw = need_w ? &g.GradBuffer(iw) : nullptr;
        for (const GridEntry& e : kept) {
          const Scalar* go = &gout.data()[e.ego * out_dim];
          for (size_t k = 0; k < ch; ++k) {
            const size_t wrow = (e.cell * ch + k) * out_dim;
            if (need_p) {
              Scalar acc = 0;
              for (size_t j = 0; j < out_dim; ++j) acc += go[j] * wv[wrow + j];
              (*gp)[e.source * ch + k] += e.weight * acc;
            }
            if (need_w) {
              const Scalar s = e.weight * pv[e.source * ch + k];
              if (s == 0) continue;
              for (size_t j = 0; j < out_dim; ++j) (*gw)[wrow + j] += s * go[j];
            }
          }
        }
      });
}

}  // namespace urnn
