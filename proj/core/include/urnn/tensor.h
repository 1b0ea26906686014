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

#ifndef URNN_TENSOR_H_
#define URNN_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "urnn/common.h"

namespace urnn {

using Shape = std::vector<size_t>;

// Dense row-major array. Rank-1 tensors behave as a single row when a
// matrix view is needed.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, Scalar fill = 0);
  Tensor(Shape shape, std::vector<Scalar> data);

  static Tensor Zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor Vector(std::initializer_list<Scalar> values);
  // Rows given as nested lists; all rows must have equal length.
  static Tensor Matrix(std::initializer_list<std::initializer_list<Scalar>> rows);

  const Shape& shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // Matrix view: rank-1 is 1 x n; rank >= 2 collapses trailing axes.
  size_t rows() const;
  size_t cols() const;

  Scalar& operator[](size_t i) { return data_[i]; }
  Scalar operator[](size_t i) const { return data_[i]; }
  Scalar& at(size_t r, size_t c) { return data_[r * cols() + c]; }
  Scalar at(size_t r, size_t c) const { return data_[r * cols() + c]; }

  std::span<Scalar> data() { return data_; }
  std::span<const Scalar> data() const { return data_; }
  std::vector<Scalar>& storage() { return data_; }

  void Fill(Scalar v);
  Tensor Reshaped(Shape shape) const;

  // Bitwise equality of shape and data.
  bool operator==(const Tensor& other) const = default;

  std::string ShapeString() const;

 private:
  Shape shape_;
  std::vector<Scalar> data_;
};

size_t ShapeProduct(const Shape& shape);
std::string ShapeToString(const Shape& shape);

}  // namespace urnn

#endif  // URNN_TENSOR_H_
