/*
 * Copyright 2026 The VoxelForge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VOXELFORGE_TENSOR_HPP_
#define VOXELFORGE_TENSOR_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "voxelforge/errors.hpp"

namespace voxelforge {

/// Dense (batch, channel, depth, height, width) tensor, width fastest.
/// double is used for gradient checks, float for training.
template <typename T>
class Tensor5 {
 public:
  using Shape = std::array<int, 5>;
  using value_type = T;

  Tensor5() = default;
  explicit Tensor5(const Shape& shape, T fill = T{}) : shape_(shape) {
    for (int s : shape) {
      if (s < 0) throw std::invalid_argument("tensor dims must be non-negative");
    }
    data_.assign(count(shape), fill);
  }

  static std::size_t count(const Shape& s) {
    std::size_t n = 1;
    for (int v : s) n *= static_cast<std::size_t>(v);
    return n;
  }

  const Shape& shape() const { return shape_; }
  int n() const { return shape_[0]; }
  int c() const { return shape_[1]; }
  int d() const { return shape_[2]; }
  int h() const { return shape_[3]; }
  int w() const { return shape_[4]; }
  std::size_t size() const { return data_.size(); }
  std::size_t spatial() const {
    return static_cast<std::size_t>(shape_[2]) * shape_[3] * shape_[4];
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  /// Start of the (n, c) spatial slab.
  T* slab(int n, int c) {
    return data_.data() + (static_cast<std::size_t>(n) * shape_[1] + c) * spatial();
  }
  const T* slab(int n, int c) const {
    return data_.data() + (static_cast<std::size_t>(n) * shape_[1] + c) * spatial();
  }

  std::size_t offset(int n, int c, int d, int h, int w) const {
    return (((static_cast<std::size_t>(n) * shape_[1] + c) * shape_[2] + d) *
                shape_[3] +
            h) *
               shape_[4] +
           w;
  }
  T& operator()(int n, int c, int d, int h, int w) { return data_[offset(n, c, d, h, w)]; }
  const T& operator()(int n, int c, int d, int h, int w) const {
    return data_[offset(n, c, d, h, w)];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  template <typename U>
  bool same_shape(const Tensor5<U>& o) const {
    return shape_ == o.shape();
  }

  friend bool operator==(const Tensor5&, const Tensor5&) = default;

 private:
  Shape shape_{0, 0, 0, 0, 0};
  std::vector<T> data_;
};

std::string shape_string(const std::array<int, 5>& s);

template <typename T>
void require_same_shape(const Tensor5<T>& a, const Tensor5<T>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                shape_string(a.shape()) + " vs " +
                                shape_string(b.shape()));
  }
}

/// Throws NumericError naming `what` if any entry is NaN or infinite.
template <typename T>
void require_finite(std::span<const T> values, const std::string& what) {
  for (T v : values) {
    if (!std::isfinite(v)) throw NumericError("non-finite value in " + what);
  }
}

template <typename To, typename From>
Tensor5<To> tensor_cast(const Tensor5<From>& t) {
  Tensor5<To> out(t.shape());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = static_cast<To>(t[i]);
  return out;
}

}  // namespace voxelforge

#endif  // VOXELFORGE_TENSOR_HPP_
