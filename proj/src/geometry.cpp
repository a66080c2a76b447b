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

#include "voxelforge/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "voxelforge/errors.hpp"

namespace voxelforge {

// ---------------------------------------------------------------------------
// VoxelGridSpec

VoxelGridSpec VoxelGridSpec::canonical() {
  return from_extent(Eigen::Vector3d::Zero(), Eigen::Vector3d(4.8, 2.88, 4.8),
                     0.02);
}

VoxelGridSpec VoxelGridSpec::desk() {
  return from_extent(Eigen::Vector3d::Zero(), Eigen::Vector3d(4.8, 2.88, 4.8),
                     0.08);
}

VoxelGridSpec VoxelGridSpec::from_extent(const Eigen::Vector3d& origin,
                                         const Eigen::Vector3d& extent,
                                         double voxel_size) {
  if (!(voxel_size > 0.0)) {
    throw std::invalid_argument("voxel_size must be positive");
  }
  VoxelGridSpec spec;
  spec.origin = origin;
  spec.voxel_size = voxel_size;
  for (int a = 0; a < 3; ++a) {
    const double cells = extent[a] / voxel_size;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9) {
      throw std::invalid_argument("extent is not a multiple of voxel_size");
    }
    spec.dims[a] = static_cast<int>(rounded);
  }
  spec.validate();
  return spec;
}

void VoxelGridSpec::validate() const {
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw std::invalid_argument("voxel_size must be positive and finite");
  }
  if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) {
    throw std::invalid_argument("grid dims must all be positive");
  }
  if (!origin.allFinite()) {
    throw std::invalid_argument("grid origin must be finite");
  }
}

int VoxelGridSpec::voxels_in(double meters) const {
  return static_cast<int>(std::lround(meters / voxel_size));
}

VoxelGridSpec VoxelGridSpec::downsampled(int factor) const {
  if (factor <= 0) throw std::invalid_argument("factor must be positive");
  VoxelGridSpec out = *this;
  for (int a = 0; a < 3; ++a) {
    if (dims[a] % factor != 0) {
      throw std::invalid_argument("grid dims not divisible by factor");
    }
    out.dims[a] = dims[a] / factor;
  }
  out.voxel_size = voxel_size * factor;
  return out;
}

std::string to_string(const VoxelGridSpec& spec) {
  std::ostringstream os;
  os << spec.dims[0] << "x" << spec.dims[1] << "x" << spec.dims[2] << " @ "
     << spec.voxel_size << " m, origin (" << spec.origin.x() << ", "
     << spec.origin.y() << ", " << spec.origin.z() << ")";
  return os.str();
}

std::optional<VoxelIndex> world_to_voxel(const Eigen::Vector3d& p,
                                         const VoxelGridSpec& spec) {
  const Eigen::Vector3d rel = (p - spec.origin) / spec.voxel_size;
  if (!rel.allFinite()) return std::nullopt;
  VoxelIndex v;
  int* out[3] = {&v.x, &v.y, &v.z};
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor(rel[a]);
    if (f < 0.0 || f >= spec.dims[a]) return std::nullopt;
    *out[a] = static_cast<int>(f);
  }
  return v;
}

void require_same_spec(const VoxelGridSpec& a, const VoxelGridSpec& b,
                       const char* context) {
  if (!(a == b)) {
    throw DataError(std::string(context) + ": grid mismatch (" + to_string(a) +
                    " vs " + to_string(b) + ")");
  }
}

// ---------------------------------------------------------------------------
// Camera and transforms

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw std::invalid_argument("focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw std::invalid_argument("principal point outside the image");
  }
}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation,
                               const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  const double ortho =
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity())
          .cwiseAbs()
          .maxCoeff();
  if (!(ortho <= 1e-9)) {
    throw std::invalid_argument("rotation is not orthonormal");
  }
  if (!(std::abs(rotation.determinant() - 1.0) <= 1e-9)) {
    throw std::invalid_argument("rotation determinant is not +1");
  }
  if (!translation.allFinite()) {
    throw std::invalid_argument("translation must be finite");
  }
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform out;
  out.rotation_ = rotation_.transpose();
  out.translation_ = -(out.rotation_ * translation_);
  return out;
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
  RigidTransform out;
  out.rotation_ = rotation_ * rhs.rotation_;
  out.translation_ = rotation_ * rhs.translation_ + translation_;
  return out;
}

Eigen::Vector3d unproject_pixel(double u, double v, double d,
                                const CameraIntrinsics& k) {
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw std::invalid_argument("depth must be positive and finite");
  }
  if (!k.contains_pixel(u, v)) {
    throw std::invalid_argument("pixel outside the image");
  }
  return {(u - k.cx) * d / k.fx, (v - k.cy) * d / k.fy, d};
}

Eigen::Vector2d project_point(const Eigen::Vector3d& p,
                              const CameraIntrinsics& k) {
  if (!(p.z() > 0.0)) {
    throw std::invalid_argument("point is not in front of the camera");
  }
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

PointCloud depth_to_point_cloud(const DepthMap& depth, const CameraIntrinsics& k,
                                const RigidTransform& camera_to_world) {
  k.validate();
  if (depth.width() != k.width || depth.height() != k.height) {
    throw DataError("depth map size does not match camera intrinsics");
  }
  PointCloud cloud;
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      const double d = depth(u, v);
      if (!std::isfinite(d) || d < 0.0) {
        throw DataError("depth map holds a negative or non-finite value");
      }
      if (d == 0.0) continue;
      cloud.points.push_back(camera_to_world.apply(unproject_pixel(u, v, d, k)));
    }
  }
  return cloud;
}

VoxelizeResult voxelize(const PointCloud& cloud, const VoxelGridSpec& spec) {
  VoxelizeResult result{BinaryVolume(spec, 0), 0};
  for (const auto& p : cloud.points) {
    if (auto v = world_to_voxel(p, spec)) {
      result.occupancy[*v] = 1;
    } else {
      ++result.dropped;
    }
  }
  return result;
}

}  // namespace voxelforge
