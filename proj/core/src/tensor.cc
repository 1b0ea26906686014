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

#include "urnn/tensor.h"

#include <algorithm>
#include <sstream>

namespace urnn {

size_t ShapeProduct(const Shape& shape) {
  size_t n = 1;
  for (size_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ')';
  return os.str();
}

Tensor::Tensor(Shape shape, Scalar fill)
    : shape_(std::move(shape)), data_(ShapeProduct(shape_), fill) {
  for (size_t d : shape_) {
    if (d == 0) throw ShapeError("tensor extents must be positive: " + ShapeString());
  }
}

Tensor::Tensor(Shape shape, std::vector<Scalar> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (size_t d : shape_) {
    if (d == 0) throw ShapeError("tensor extents must be positive: " + ShapeString());
  }
  if (ShapeProduct(shape_) != data_.size()) {
    throw ShapeError("shape " + ShapeString() + " does not match " +
                     std::to_string(data_.size()) + " values");
  }
}

Tensor Tensor::Vector(std::initializer_list<Scalar> values) {
  return Tensor({values.size()}, std::vector<Scalar>(values));
}

Tensor Tensor::Matrix(std::initializer_list<std::initializer_list<Scalar>> rows) {
  const size_t r = rows.size();
  const size_t c = r ? rows.begin()->size() : 0;
  std::vector<Scalar> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged matrix literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(data));
}

size_t Tensor::rows() const {
  if (shape_.size() <= 1) return 1;
  return shape_[0];
}

size_t Tensor::cols() const {
  if (shape_.empty()) return 1;
  if (shape_.size() == 1) return shape_[0];
  return data_.size() / shape_[0];
}

void Tensor::Fill(Scalar v) { std::fill(data_.begin(), data_.end(), v); }

Tensor Tensor::Reshaped(Shape shape) const { return Tensor(std::move(shape), data_); }

std::string Tensor::ShapeString() const { return ShapeToString(shape_); }

}  // namespace urnn
