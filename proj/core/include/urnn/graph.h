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

#ifndef URNN_GRAPH_H_
#define URNN_GRAPH_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urnn/tensor.h"

namespace urnn {

// A named trainable tensor with an optional gradient buffer. Gradients are
// accumulated by Graph::Backward / Graph::AccumulateParamGrads and cleared
// explicitly with ZeroGrad.
struct Parameter {
  std::string name;
  Tensor value;
  std::optional<Tensor> grad;

  void ZeroGrad() { grad = Tensor::Zeros(value.shape()); }
};

class Graph;

// Handle to a node recorded in a Graph. Cheap to copy; only valid while the
// owning graph is alive.
class Var {
 public:
  Var() = default;
  Var(Graph* graph, uint32_t id) : graph_(graph), id_(id) {}

  Graph* graph() const { return graph_; }
  uint32_t id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;
  // Null until a backward pass reaches this node.
  const Tensor* grad() const;

 private:
  Graph* graph_ = nullptr;
  uint32_t id_ = 0;
};

// Tape of executed operations. Nodes are appended in execution order, so
// walking the tape backwards visits every node after all of its consumers.
// A graph is single-owner: do not record into it from several threads.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, const Tensor& out_grad)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var Constant(Tensor value);
  // Leaf owning its own gradient buffer; repeated backward passes accumulate.
  Var Leaf(Tensor value, bool requires_grad = true);
  // Leaf bound to a parameter. The parameter value is copied into the tape.
  Var Param(Parameter& param);
  // Parameter read as a constant (no gradient recorded).
  Var Frozen(const Parameter& param) { return Constant(param.value); }

  // Records a node computed by an operation.
  Var Record(Tensor value, std::span<const Var> inputs, BackwardFn backward);

  // Reverse-mode sweep from a scalar root. Gradients of leaves created with
  // Leaf() accumulate across calls; when accumulate_params is set the
  // parameter leaves' gradients are added into their Parameter::grad.
  void Backward(Var root, bool accumulate_params = true);
  // Adds this graph's parameter-leaf gradients into the bound parameters.
  // Used to reduce gradients from several graphs in a fixed order.
  void AccumulateParamGrads() const;

  const Tensor& value(uint32_t id) const { return nodes_[id].value; }
  bool requires_grad(uint32_t id) const { return nodes_[id].requires_grad; }
  const Tensor* grad(uint32_t id) const {
    return nodes_[id].grad.empty() ? nullptr : &nodes_[id].grad;
  }
  // Gradient buffer for accumulation inside backward functions.
  Tensor& GradBuffer(uint32_t id);

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool is_leaf = false;
    Parameter* param = nullptr;
    BackwardFn backward;
  };

  // Deque keeps value() references stable while nodes are appended.
  std::deque<Node> nodes_;
};

enum class ElementwiseOp { kAdd, kMul, kTanh, kSigmoid, kRelu };

// Matrix product; rank-1 operands are treated as a single row.
Var MatMul(Var a, Var b);
Var Elementwise(ElementwiseOp op, std::span<const Var> inputs);
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Div(Var a, Var b);
Var Tanh(Var a);
Var Sigmoid(Var a);
Var Relu(Var a);
Var Exp(Var a);
Var Log(Var a);
Var Square(Var a);
Var Scale(Var a, Scalar s);
Var AddScalar(Var a, Scalar s);
// a[r, c] + bias[c] for every row r.
Var AddRowBias(Var a, Var bias);
// Rank-1: axis 0 only. Rank-2: axis 0 (rows) or 1 (columns).
Var Concat(Var a, Var b, size_t axis);
Var SliceCols(Var a, size_t begin, size_t end);
// Same data, new shape (element count must match).
Var Reshape(Var a, Shape shape);
Var Sum(Var a);
Var Mean(Var a);

// One contribution of a source row to a pooling-grid cell of an ego row.
struct GridEntry {
  uint32_t ego;
  uint32_t cell;
  uint32_t source;
  Scalar weight;
};

// Sparse "rasterize then linear map": for every entry,
//   out[ego, :] += weight * sum_k payload[source, k] * w[cell * C + k, :]
// where C is the payload width. Equivalent to building the dense
// (egos x cells*C) grid and multiplying by w, without materializing it.
Var GridLinear(Var payload, std::span<const GridEntry> entries, size_t egos,
               Var w);

}  // namespace urnn

#endif  // URNN_GRAPH_H_
