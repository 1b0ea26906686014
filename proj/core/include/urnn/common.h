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

#ifndef URNN_COMMON_H_
#define URNN_COMMON_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace urnn {

#ifdef URNN_SINGLE_PRECISION
using Scalar = float;
#else
using Scalar = double;
#endif

// Error hierarchy. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Corrupt or inconsistent persisted data (checksums, missing records).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class VersionError : public IntegrityError {
 public:
  using IntegrityError::IntegrityError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  bool operator==(const Vec2& o) const = default;

  double Dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double Norm() const { return std::hypot(x, y); }
  Vec2 Rotated(double theta) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * x - s * y, s * x + c * y};
  }
};

inline double Distance(const Vec2& a, const Vec2& b) { return (a - b).Norm(); }

// Seeded generator with distribution helpers that do not depend on the
// standard library's (implementation-defined) distribution algorithms, so a
// seed reproduces the same stream on every toolchain.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n).
  uint64_t Below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  double Normal(double mean, double stddev) {
    // Box-Muller; one sample per call keeps the stream position simple.
    double u1 = Uniform();
    while (u1 <= 0.0) u1 = Uniform();
    const double u2 = Uniform();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(2.0 * M_PI * u2);
  }

  template <typename Container>
  void Shuffle(Container& c) {
    for (size_t i = c.size(); i > 1; --i) {
      std::swap(c[i - 1], c[Below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace urnn

#endif  // URNN_COMMON_H_
