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

#ifndef VOXELFORGE_RASTER_HPP_
#define VOXELFORGE_RASTER_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace voxelforge {

/// Row-major height x width image. `Tag` keeps semantically different
/// rasters (depth, gray, edge masks) from being mixed up at compile time.
template <typename T, typename Tag>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    if (width < 0 || height < 0) {
      throw std::invalid_argument("raster dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // (u, v) = (column, row).
  T& operator()(int u, int v) { return data_[index(u, v)]; }
  const T& operator()(int u, int v) const { return data_[index(u, v)]; }

  bool contains(int u, int v) const {
    return u >= 0 && v >= 0 && u < width_ && v < height_;
  }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  template <typename OtherTag, typename U>
  bool same_shape(const Raster<U, OtherTag>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * width_ + u;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Rgb = std::array<double, 3>;

struct DepthTag;
struct GrayTag;
struct RgbTag;
struct EdgeTag;
struct SurfaceIdTag;

/// Depth along the optical axis in meters; 0 encodes a missing reading.
using DepthMap = Raster<double, DepthTag>;
/// Intensity in [0, 1].
using GrayImage = Raster<double, GrayTag>;
/// Channels in [0, 1].
using RgbImage = Raster<Rgb, RgbTag>;
using EdgeMask = Raster<std::uint8_t, EdgeTag>;

}  // namespace voxelforge

#endif  // VOXELFORGE_RASTER_HPP_
