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

#ifndef VOXELFORGE_GEOMETRY_HPP_
#define VOXELFORGE_GEOMETRY_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "voxelforge/raster.hpp"
#include "voxelforge/volume.hpp"

namespace voxelforge {

/// Pinhole intrinsics. The camera frame has x right, y down (image rows)
/// and z along the optical axis.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const;
  bool contains_pixel(double u, double v) const {
    return u >= 0.0 && v >= 0.0 && u < width && v < height;
  }
  friend bool operator==(const CameraIntrinsics&,
                         const CameraIntrinsics&) = default;
};

/// Proper rigid motion p -> rotation * p + translation.
class RigidTransform {
 public:
  RigidTransform() = default;
  /// Throws std::invalid_argument unless rotation is orthonormal with
  /// determinant +1 (both within 1e-9).
  RigidTransform(const Eigen::Matrix3d& rotation,
                 const Eigen::Vector3d& translation);

  static RigidTransform identity() { return {}; }

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation_ * p + translation_;
  }
  RigidTransform inverse() const;
  RigidTransform operator*(const RigidTransform& rhs) const;

 private:
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// ((u - cx) d / fx, (v - cy) d / fy, d). Throws std::invalid_argument for
/// d <= 0 or a pixel outside the image.
Eigen::Vector3d unproject_pixel(double u, double v, double d,
                                const CameraIntrinsics& k);

/// Inverse of unproject_pixel for a camera-frame point with z > 0.
Eigen::Vector2d project_point(const Eigen::Vector3d& p,
                              const CameraIntrinsics& k);

/// One world-frame point per pixel with positive depth. `camera_to_world`
/// maps camera coordinates into the grid frame.
PointCloud depth_to_point_cloud(const DepthMap& depth, const CameraIntrinsics& k,
                                const RigidTransform& camera_to_world);

struct VoxelizeResult {
  BinaryVolume occupancy;
  std::size_t dropped = 0;  // points outside the grid
};

VoxelizeResult voxelize(const PointCloud& cloud, const VoxelGridSpec& spec);

}  // namespace voxelforge

#endif  // VOXELFORGE_GEOMETRY_HPP_
