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

#ifndef VOXELFORGE_SCENE_HPP_
#define VOXELFORGE_SCENE_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "voxelforge/geometry.hpp"
#include "voxelforge/labels.hpp"
#include "voxelforge/raster.hpp"
#include "voxelforge/volume.hpp"

namespace voxelforge {

/// Room boundary planes, named by the axis they cut and the side of the
/// interior they bound.
enum class RoomFace : std::uint8_t {
  kWallMinX = 0,
  kWallMaxX = 1,
  kFloor = 2,
  kCeiling = 3,
  kWallMinZ = 4,
  kWallMaxZ = 5,
};

bool is_wall(RoomFace f);

/// Solid axis-aligned box in world (grid) coordinates.
struct SceneBox {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Zero();
  std::uint8_t label = kObjects;
  Rgb albedo{0.5, 0.5, 0.5};
  friend bool operator==(const SceneBox&, const SceneBox&) = default;
};

/// Zero-thickness colored rectangle lying on a wall. `a` is the horizontal
/// coordinate along the wall (z for x walls, x for z walls), `y` the height.
struct Decal {
  RoomFace wall = RoomFace::kWallMaxZ;
  double a0 = 0.0;
  double a1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;
  Rgb color{0.1, 0.1, 0.1};
  friend bool operator==(const Decal&, const Decal&) = default;
};

struct SceneSpec {
  Eigen::Vector3d room_min = Eigen::Vector3d::Zero();  // interior box
  Eigen::Vector3d room_max = Eigen::Vector3d::Zero();
  double wall_thickness = 0.06;
  Rgb wall_albedo{0.85, 0.83, 0.80};
  Rgb floor_albedo{0.55, 0.45, 0.35};
  Rgb ceiling_albedo{0.92, 0.92, 0.92};
  CameraIntrinsics camera;
  RigidTransform camera_to_world;
  std::vector<SceneBox> objects;
  std::vector<Decal> decals;

  /// Throws DataError unless objects lie inside the room, decals lie on a
  /// wall within its bounds and the camera is inside the room and outside
  /// every object.
  void validate() const;
  double plane(RoomFace f) const;
  friend bool operator==(const SceneSpec&, const SceneSpec&);
};

/// Rounds to the nearest desk-grid voxel center (0.04 + 0.08 k meters).
double snap_to_desk_center(double meters);

/// Default 160 x 120 pinhole camera with a 60 degree horizontal field of view.
CameraIntrinsics default_camera();

/// Camera-to-world rotation for a camera at `position` looking along
/// (yaw about +y, pitch down), with image rows pointing downwards in the
/// world.
RigidTransform look_transform(const Eigen::Vector3d& position, double yaw, double pitch);

/// Deterministic scene from a seed. `difficulty` in [0, 1] scales the
/// object count and decal probability; 0 yields a bare room.
SceneSpec generate_scene(std::uint64_t seed, double difficulty);

/// Copy of the scene without decals.
SceneSpec strip_decals(const SceneSpec& scene);

/// Returns the scene unchanged if it already has a decal whose corners and
/// center are all visible; otherwise adds a dark poster at a visible spot on
/// some wall. Throws DataError when no spot is found.
SceneSpec ensure_decal(const SceneSpec& scene, std::uint64_t seed);

/// Ray hit in world coordinates.
struct RayHit {
  double t = 0.0;           // distance along the (unnormalized) ray
  int surface = -1;         // 0..5 room faces, 6 + i object i
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  int axis = 0;             // axis of the hit face normal
  int decal = -1;           // decal index when the hit shows a decal
};

/// First intersection of origin + t dir (t > 0) with the room or objects.
/// Rays start inside the room so a hit always exists.
RayHit cast_ray(const SceneSpec& scene, const Eigen::Vector3d& origin,
                const Eigen::Vector3d& dir);

struct Sample {
  RgbImage rgb;
  DepthMap depth;
  LabelVolume gt;     // full-resolution classes 0..11
  BinaryVolume room;  // interior plus wall slabs
  CameraIntrinsics camera;
  RigidTransform camera_to_world;
  EdgeMask decal_mask;                // pixels showing a decal
  Raster<int, SurfaceIdTag> surface;  // surface id per pixel
};

/// Ray-casts depth (distance along the optical axis) and flat-shaded RGB,
/// and labels every voxel center of `grid` by point-in-box tests. Objects
/// take precedence over decals, decals over the room shell.
Sample render(const SceneSpec& scene, const VoxelGridSpec& grid);

/// Pixels of `mask` with a 4-neighbor outside the mask or on the image
/// border.
std::vector<std::pair<int, int>> mask_boundary(const EdgeMask& mask);

/// True when the world point is inside the image and not hidden by a
/// nearer surface (tolerance `eps` meters along the ray).
bool point_visible(const SceneSpec& scene, const Eigen::Vector3d& p, double eps = 1e-6);

}  // namespace voxelforge

#endif  // VOXELFORGE_SCENE_HPP_
