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

#ifndef VOXELFORGE_TSDF_HPP_
#define VOXELFORGE_TSDF_HPP_

#include <cstddef>
#include <cstdint>

#include "voxelforge/geometry.hpp"
#include "voxelforge/volume.hpp"

namespace voxelforge {

enum class Visibility : std::uint8_t {
  kVisibleFree = 0,
  kOccluded = 1,
  kOccupied = 2,
  kOutsideView = 3,
};

using VisibilityVolume = Volume<Visibility>;

/// Squared Euclidean distance in voxel units to the nearest occupied voxel.
using DistanceVolume = Volume<std::uint32_t>;

enum class TsdfKind : std::uint8_t { kTsdf, kFlipped };
enum class TsdfChannel : std::uint8_t { kSurface, kEdge };

struct TsdfVolume {
  Volume<float> values;  // all in [-1, 1]
  TsdfKind kind = TsdfKind::kTsdf;
  TsdfChannel channel = TsdfChannel::kSurface;
};

/// Classifies every voxel center against the observed depth map.
///
/// A center that is behind the camera, projects off-image, or lands on a
/// pixel without depth is kOutsideView. Otherwise its camera-frame depth z
/// is compared with the observed depth d of the pixel it projects to:
/// z < d - voxel_size/2 is kVisibleFree, z > d + voxel_size/2 is kOccluded,
/// and centers inside that band are kOccupied when `occupied` marks them and
/// kVisibleFree otherwise.
VisibilityVolume compute_visibility(const DepthMap& depth,
                                    const CameraIntrinsics& k,
                                    const RigidTransform& camera_to_world,
                                    const VoxelGridSpec& spec,
                                    const BinaryVolume& occupied);

/// Exact squared EDT by three separable lower-envelope passes. Throws
/// EmptyVolumeError when nothing is occupied.
DistanceVolume edt3_squared(const BinaryVolume& occupied);

/// sign * min(distance / truncation, 1). Sign is +1 for kVisibleFree and
/// kOccupied, -1 for kOccluded and kOutsideView. Occupied voxels encode 0.
TsdfVolume tsdf_encode(const BinaryVolume& occupied, const VisibilityVolume& vis,
                       double truncation, TsdfChannel channel = TsdfChannel::kSurface);

/// Same encoding from a precomputed distance field.
TsdfVolume tsdf_from_distance(const DistanceVolume& dist2,
                              const VisibilityVolume& vis, double truncation,
                              TsdfChannel channel);

/// sign(x) * (1 - |x|) with sign(0) = +1.
inline float flip_value(float x) {
  const float s = x >= 0.0f ? 1.0f : -1.0f;
  return s * (1.0f - (x >= 0.0f ? x : -x));
}

/// Applies flip_value to every voxel. Rejects an already flipped volume.
TsdfVolume flip_tsdf(const TsdfVolume& v);

struct ChannelEncoding {
  TsdfVolume volume;
  std::size_t occupied_voxels = 0;
  std::size_t dropped_points = 0;
  bool empty = false;  // no point landed in the grid; volume is all zero
};

/// voxelize -> tsdf_encode (distance to this channel's own voxels, sign from
/// the shared camera visibility) -> flip_tsdf.
ChannelEncoding encode_channel(const PointCloud& points,
                               const VisibilityVolume& vis,
                               const VoxelGridSpec& spec, double truncation,
                               TsdfChannel channel);

}  // namespace voxelforge

#endif  // VOXELFORGE_TSDF_HPP_
