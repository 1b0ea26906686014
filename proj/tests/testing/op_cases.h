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

#ifndef URNN_TESTS_TESTING_OP_CASES_H_
#define URNN_TESTS_TESTING_OP_CASES_H_

#include <vector>

#include "testing/oracles.h"
#include "urnn/graph.h"

namespace urnn::testing {

// One scalar-valued use of each differentiable op, with its input shapes
// and sampling range.
struct OpCase {
  const char* name;
  std::vector<Shape> shapes;
  testing::ScalarFn f;
  double lo = -1.0;
  double hi = 1.0;
};

inline std::vector<OpCase> OpCases() {
  auto weighted = [](Var v) {
    // Non-uniform weights so symmetric errors cannot cancel.
    Graph& g = *v.graph();
    Tensor w(v.shape());
    for (size_t i = 0; i < w.size(); ++i) w[i] = static_cast<Scalar>(0.3 + 0.17 * i);
    return Sum(Mul(v, g.Constant(w)));
  };
  return {
      {"matmul", {{3, 4}, {4, 2}}, [=](Graph&, auto x) { return weighted(MatMul(x[0], x[1])); }},
      {"add", {{2, 3}, {2, 3}}, [=](Graph&, auto x) { return weighted(Add(x[0], x[1])); }},
      {"sub", {{2, 3}, {2, 3}}, [=](Graph&, auto x) { return weighted(Sub(x[0], x[1])); }},
      {"mul", {{2, 3}, {2, 3}}, [=](Graph&, auto x) { return weighted(Mul(x[0], x[1])); }},
      {"div", {{2, 3}, {2, 3}},
       [=](Graph&, auto x) { return weighted(Div(x[0], AddScalar(Square(x[1]), 0.5))); }},
      {"tanh", {{2, 3}}, [=](Graph&, auto x) { return weighted(Tanh(x[0])); }, -2, 2},
      {"sigmoid", {{2, 3}}, [=](Graph&, auto x) { return weighted(Sigmoid(x[0])); }, -3, 3},
      {"relu", {{2, 3}}, [=](Graph&, auto x) { return weighted(Relu(AddScalar(x[0], 0))); }, 0.1,
       1},
      {"exp", {{2, 3}}, [=](Graph&, auto x) { return weighted(Exp(x[0])); }},
      {"log", {{2, 3}}, [=](Graph&, auto x) { return weighted(Log(x[0])); }, 0.5, 2},
      {"square", {{2, 3}}, [=](Graph&, auto x) { return weighted(Square(x[0])); }},
      {"scale", {{2, 3}}, [=](Graph&, auto x) { return weighted(Scale(x[0], -1.7)); }},
      {"add_row_bias", {{3, 4}, {4}},
       [=](Graph&, auto x) { return weighted(AddRowBias(x[0], x[1])); }},
      {"concat_cols", {{2, 3}, {2, 2}}, [=](Graph&, auto x) { return weighted(Concat(x[0], x[1], 1)); }},
      {"concat_rows", {{2, 3}, {1, 3}}, [=](Graph&, auto x) { return weighted(Concat(x[0], x[1], 0)); }},
      {"concat_vec", {{3}, {2}}, [=](Graph&, auto x) { return weighted(Concat(x[0], x[1], 0)); }},
      {"slice_cols", {{3, 5}}, [=](Graph&, auto x) { return weighted(SliceCols(x[0], 1, 4)); }},
      {"reshape", {{2, 6}}, [=](Graph&, auto x) { return weighted(Reshape(x[0], {3, 4})); }},
      {"mean", {{2, 3}}, [](Graph&, auto x) { return Mean(Square(x[0])); }},
      {"grid_linear", {{4, 2}, {12, 3}},
       [=](Graph&, auto x) {
         const GridEntry entries[] = {{0, 0, 1, 1.0}, {0, 3, 2, 0.5}, {0, 3, 3, 0.5},
                                      {1, 5, 0, 1.0}, {2, 2, 2, -1.0}};
         return weighted(GridLinear(x[0], entries, 3, x[1]));
       }},
  };
}

}  // namespace urnn::testing

#endif  // URNN_TESTS_TESTING_OP_CASES_H_
