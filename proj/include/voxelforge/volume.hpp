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

#ifndef VOXELFORGE_VOLUME_HPP_
#define VOXELFORGE_VOLUME_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace voxelforge {

struct VoxelIndex {
  int x = 0;
  int y = 0;
  int z = 0;
  friend bool operator==(const VoxelIndex&, const VoxelIndex&) = default;
};

/// World-to-grid mapping shared by every volumetric stage.
///
/// Axis convention: x is horizontal (width), y is vertical and points up,
/// z is depth. The camera looks roughly along +z. `origin` is the min corner
/// of voxel (0, 0, 0).
struct VoxelGridSpec {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  double voxel_size = 0.0;
  std::array<int, 3> dims{0, 0, 0};

  /// 240 x 144 x 240 voxels of 0.02 m spanning 4.8 x 2.88 x 4.8 m.
  static VoxelGridSpec canonical();
  /// 60 x 36 x 60 voxels of 0.08 m over the same extent.
  static VoxelGridSpec desk();
  /// Dims rounded from extent / voxel_size; throws if the extent is not an
  /// integer multiple of voxel_size to within 1e-9 voxels.
  static VoxelGridSpec from_extent(const Eigen::Vector3d& origin,
                                   const Eigen::Vector3d& extent,
                                   double voxel_size);

  void validate() const;
  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  Eigen::Vector3d extent() const {
    return Eigen::Vector3d(dims[0], dims[1], dims[2]) * voxel_size;
  }
  bool contains(const VoxelIndex& v) const {
    return v.x >= 0 && v.y >= 0 && v.z >= 0 && v.x < dims[0] &&
           v.y < dims[1] && v.z < dims[2];
  }
  Eigen::Vector3d voxel_center(const VoxelIndex& v) const {
    return origin + voxel_size * Eigen::Vector3d(v.x + 0.5, v.y + 0.5, v.z + 0.5);
  }
  /// Number of whole voxels in a metric length (rounded).
  int voxels_in(double meters) const;
  /// Coarser grid with the same origin; dims must be divisible by factor.
  VoxelGridSpec downsampled(int factor) const;

  std::size_t linear_index(const VoxelIndex& v) const {
    return static_cast<std::size_t>(v.x) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(v.y) +
                static_cast<std::size_t>(dims[1]) * v.z);
  }
  VoxelIndex unravel(std::size_t i) const {
    const auto nx = static_cast<std::size_t>(dims[0]);
    const auto ny = static_cast<std::size_t>(dims[1]);
    return {static_cast<int>(i % nx), static_cast<int>((i / nx) % ny),
            static_cast<int>(i / (nx * ny))};
  }

  friend bool operator==(const VoxelGridSpec& a, const VoxelGridSpec& b) {
    return a.origin == b.origin && a.voxel_size == b.voxel_size &&
           a.dims == b.dims;
  }
};

std::string to_string(const VoxelGridSpec& spec);

/// floor((p - origin) / voxel_size) when inside the grid. Points on a cell
/// boundary belong to the higher-index cell.
std::optional<VoxelIndex> world_to_voxel(const Eigen::Vector3d& p,
                                         const VoxelGridSpec& spec);

/// Dense scalar field over a grid, x-fastest storage.
template <typename T>
class Volume {
 public:
  using value_type = T;

  Volume() = default;
  explicit Volume(const VoxelGridSpec& spec, T fill = T{}) : spec_(spec) {
    spec_.validate();
    data_.assign(spec_.voxel_count(), fill);
  }

  const VoxelGridSpec& spec() const { return spec_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(int x, int y, int z) { return data_[spec_.linear_index({x, y, z})]; }
  const T& operator()(int x, int y, int z) const {
    return data_[spec_.linear_index({x, y, z})];
  }
  T& operator[](const VoxelIndex& v) { return data_[spec_.linear_index(v)]; }
  const T& operator[](const VoxelIndex& v) const {
    return data_[spec_.linear_index(v)];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  VoxelGridSpec spec_;
  std::vector<T> data_;
};

/// Voxel occupancy, 0 = free, 1 = occupied.
using BinaryVolume = Volume<std::uint8_t>;

/// Throws DataError unless the two specs are identical.
void require_same_spec(const VoxelGridSpec& a, const VoxelGridSpec& b,
                       const char* context);

}  // namespace voxelforge

#endif  // VOXELFORGE_VOLUME_HPP_
