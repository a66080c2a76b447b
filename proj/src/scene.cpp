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

#include "voxelforge/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include <Eigen/Geometry>

#include "voxelforge/errors.hpp"
#include "voxelforge/parallel.hpp"

namespace voxelforge {
namespace {

constexpr double kTol = 1e-9;
constexpr double kDeskVoxel = 0.08;
constexpr int kRoomFaces = 6;

int face_axis(RoomFace f) { return static_cast<int>(f) / 2; }
bool face_is_max(RoomFace f) { return static_cast<int>(f) % 2 == 1; }

// Horizontal in-plane axis of a wall.
int wall_tangent_axis(RoomFace f) { return face_axis(f) == 0 ? 2 : 0; }

double shade(int axis, double normal_sign) {
  if (axis == 1) return normal_sign > 0 ? 1.0 : 0.7;
  return axis == 0 ? 0.78 : 0.92;
}

double quantize8(double c) { return std::round(std::clamp(c, 0.0, 1.0) * 255.0) / 255.0; }

Rgb shaded(const Rgb& albedo, double s) {
  return {quantize8(albedo[0] * s), quantize8(albedo[1] * s), quantize8(albedo[2] * s)};
}

bool inside_closed(const Eigen::Vector3d& p, const Eigen::Vector3d& lo,
                   const Eigen::Vector3d& hi, double tol) {
  for (int a = 0; a < 3; ++a) {
    if (p[a] < lo[a] - tol || p[a] > hi[a] + tol) return false;
  }
  return true;
}

bool boxes_overlap(const SceneBox& a, const SceneBox& b) {
  for (int k = 0; k < 3; ++k) {
    if (a.max[k] <= b.min[k] + kTol || b.max[k] <= a.min[k] + kTol) return false;
  }
  return true;
}

bool decal_contains(const Decal& d, double a, double y, double tol) {
  return a >= d.a0 - tol && a <= d.a1 + tol && y >= d.y0 - tol && y <= d.y1 + tol;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  Rgb color(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }

 private:
  std::mt19937_64 engine_;
};

// Dark, saturated poster color with luma at most 0.25.
Rgb poster_color(Rng& rng) {
  Rgb c = rng.color(0.02, 0.45);
  c[rng.integer(0, 2)] = rng.uniform(0.0, 0.1);
  const double luma = 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2];
  if (luma > 0.25) {
    for (double& v : c) v *= 0.25 / luma;
  }
  return c;
}

// Snapped interval [lo, lo + size] kept inside [bound_lo, bound_hi] and at
// least one desk voxel long.
std::pair<double, double> snapped_interval(double lo, double size, double bound_lo,
                                           double bound_hi) {
  double a = snap_to_desk_center(lo);
  double b = snap_to_desk_center(lo + size);
  a = std::max(a, bound_lo);
  b = std::min(b, bound_hi);
  if (b < a + kDeskVoxel - kTol) b = a + kDeskVoxel;
  if (b > bound_hi + kTol) {
    b = bound_hi;
    a = b - kDeskVoxel;
  }
  return {a, b};
}

struct ObjectTemplate {
  std::uint8_t label;
  double weight;
  Eigen::Vector3d size_lo;
  Eigen::Vector3d size_hi;
  enum class Mount { kFloor, kAgainstWall, kOnWall, kOnTable } mount;
};

const std::vector<ObjectTemplate>& templates() {
  using M = ObjectTemplate::Mount;
  static const std::vector<ObjectTemplate> t = {
      {kChair, 2.0, {0.4, 0.8, 0.4}, {0.6, 1.0, 0.6}, M::kFloor},
      {kBed, 1.0, {1.4, 0.5, 0.9}, {2.0, 0.6, 1.6}, M::kAgainstWall},
      {kSofa, 1.0, {1.4, 0.7, 0.7}, {2.0, 0.9, 0.9}, M::kAgainstWall},
      {kTable, 1.5, {0.8, 0.7, 0.6}, {1.4, 0.8, 1.0}, M::kFloor},
      {kFurniture, 1.5, {0.6, 1.2, 0.4}, {1.2, 2.0, 0.6}, M::kAgainstWall},
      {kObjects, 1.5, {0.2, 0.2, 0.2}, {0.4, 0.4, 0.4}, M::kOnTable},
      {kTvs, 0.8, {0.8, 0.5, 0.08}, {1.2, 0.7, 0.08}, M::kOnWall},
      {kWindow, 0.8, {0.6, 0.8, 0.08}, {1.2, 1.2, 0.08}, M::kOnWall},
  };
  return t;
}

const ObjectTemplate& pick_template(Rng& rng) {
  const auto& t = templates();
  double total = 0.0;
  for (const auto& x : t) total += x.weight;
  double r = rng.uniform(0.0, total);
  for (const auto& x : t) {
    if (r < x.weight) return x;
    r -= x.weight;
  }
  return t.back();
}

constexpr RoomFace kVisibleWalls[] = {RoomFace::kWallMinX, RoomFace::kWallMaxX,
                                      RoomFace::kWallMaxZ};

// Box of `size` (x extent measured along the wall, z extent away from it)
// flush to `wall`, at tangent offset `t0` and height `y0`.
SceneBox wall_box(const SceneSpec& s, RoomFace wall, double t0, double y0,
                  const Eigen::Vector3d& size) {
  SceneBox b;
  const int n = face_axis(wall);
  const int t = wall_tangent_axis(wall);
  const auto [a0, a1] = snapped_interval(t0, size.x(), s.room_min[t], s.room_max[t]);
  const auto [h0, h1] = snapped_interval(y0, size.y(), s.room_min.y(), s.room_max.y());
  b.min[t] = a0;
  b.max[t] = a1;
  b.min.y() = h0;
  b.max.y() = h1;
  const double depth = std::max(kDeskVoxel, snap_to_desk_center(size.z() + 0.04) - 0.04);
  if (face_is_max(wall)) {
    b.max[n] = s.room_max[n];
    b.min[n] = s.room_max[n] - depth;
  } else {
    b.min[n] = s.room_min[n];
    b.max[n] = s.room_min[n] + depth;
  }
  return b;
}

bool object_allowed(const SceneSpec& s, const SceneBox& b) {
  const Eigen::Vector3d cam = s.camera_to_world.translation();
  if (b.min.z() < cam.z() + 0.7) return false;
  if (!inside_closed(b.min, s.room_min, s.room_max, kTol) ||
      !inside_closed(b.max, s.room_min, s.room_max, kTol)) {
    return false;
  }
  for (const auto& o : s.objects) {
    if (boxes_overlap(o, b)) return false;
  }
  return true;
}

// Candidate placement for one template; may be rejected by object_allowed.
std::optional<SceneBox> propose(const SceneSpec& s, const ObjectTemplate& tpl, Rng& rng) {
  using M = ObjectTemplate::Mount;
  Eigen::Vector3d size;
  for (int a = 0; a < 3; ++a) size[a] = rng.uniform(tpl.size_lo[a], tpl.size_hi[a]);
  SceneBox b;
  switch (tpl.mount) {
    case M::kFloor:
    case M::kOnTable: {
      if (rng.chance(0.5)) std::swap(size.x(), size.z());
      double base = s.room_min.y();
      Eigen::Vector3d lo = s.room_min;
      Eigen::Vector3d hi = s.room_max;
      if (tpl.mount == M::kOnTable) {
        std::vector<const SceneBox*> tables;
        for (const auto& o : s.objects) {
          if (o.label == kTable) tables.push_back(&o);
        }
        if (!tables.empty() && rng.chance(0.7)) {
          const SceneBox* t = tables[rng.integer(0, static_cast<int>(tables.size()) - 1)];
          base = t->max.y();
          lo = t->min;
          hi = t->max;
        }
      }
      const double x0 = rng.uniform(lo.x(), std::max(lo.x(), hi.x() - size.x()));
      const double z0 = rng.uniform(lo.z(), std::max(lo.z(), hi.z() - size.z()));
      const auto [ax, bx] = snapped_interval(x0, size.x(), lo.x(), hi.x());
      const auto [az, bz] = snapped_interval(z0, size.z(), lo.z(), hi.z());
      const auto [ay, by] = snapped_interval(base, size.y(), s.room_min.y(), s.room_max.y());
      b.min = {ax, ay, az};
      b.max = {bx, by, bz};
      break;
    }
    case M::kAgainstWall: {
      const RoomFace wall = kVisibleWalls[rng.integer(0, 2)];
      const int t = wall_tangent_axis(wall);
      const double t0 = rng.uniform(s.room_min[t], std::max(s.room_min[t], s.room_max[t] - size.x()));
      b = wall_box(s, wall, t0, s.room_min.y(), size);
      break;
    }
    case M::kOnWall: {
      const RoomFace wall = kVisibleWalls[rng.integer(0, 2)];
      const int t = wall_tangent_axis(wall);
      const double t0 =
          rng.uniform(s.room_min[t] + 0.1, std::max(s.room_min[t] + 0.1, s.room_max[t] - size.x() - 0.1));
      const double y0 = s.room_min.y() + rng.uniform(0.9, 1.3);
      b = wall_box(s, wall, t0, y0, size);
      break;
    }
  }
  b.label = tpl.label;
  b.albedo = rng.color(0.15, 0.9);
  return b;
}

Decal random_decal(const SceneSpec& s, Rng& rng, RoomFace wall) {
  Decal d;
  d.wall = wall;
  const int t = wall_tangent_axis(wall);
  const double width = rng.uniform(0.5, 1.1);
  const double height = rng.uniform(0.4, 0.8);
  const double a_lo = s.room_min[t] + 0.15;
  const double a_hi = std::max(a_lo, s.room_max[t] - 0.15 - width);
  d.a0 = rng.uniform(a_lo, a_hi);
  d.a1 = std::min(d.a0 + width, s.room_max[t] - 0.05);
  const double y_lo = s.room_min.y() + 0.9;
  const double y_hi = std::max(y_lo, s.room_max.y() - 0.2 - height);
  d.y0 = rng.uniform(y_lo, y_hi);
  d.y1 = std::min(d.y0 + height, s.room_max.y() - 0.05);
  d.color = poster_color(rng);
  return d;
}

Eigen::Vector3d decal_point(const SceneSpec& s, const Decal& d, double fa, double fy) {
  Eigen::Vector3d p;
  p[face_axis(d.wall)] = s.plane(d.wall);
  p[wall_tangent_axis(d.wall)] = d.a0 + fa * (d.a1 - d.a0);
  p.y() = d.y0 + fy * (d.y1 - d.y0);
  return p;
}

// Every sampled boundary point (and the center) visible, with a pixel
// margin to the image border.
bool decal_fully_visible(const SceneSpec& s, const Decal& d) {
  const RigidTransform world_to_camera = s.camera_to_world.inverse();
  constexpr int kSteps = 8;
  for (int i = 0; i <= kSteps; ++i) {
    const double f = static_cast<double>(i) / kSteps;
    const Eigen::Vector3d pts[] = {decal_point(s, d, f, 0.0), decal_point(s, d, f, 1.0),
                                   decal_point(s, d, 0.0, f), decal_point(s, d, 1.0, f),
                                   decal_point(s, d, 0.5, 0.5)};
    for (const auto& p : pts) {
      if (!point_visible(s, p, 1e-6)) return false;
      const Eigen::Vector3d c = world_to_camera.apply(p);
      const Eigen::Vector2d uv = project_point(c, s.camera);
      if (uv.x() < 4 || uv.y() < 4 || uv.x() > s.camera.width - 5 ||
          uv.y() > s.camera.height - 5) {
        return false;
      }
    }
  }
  // Other objects must not touch the poster rectangle either (their
  // outlines would merge with the poster's).
  for (const auto& o : s.objects) {
    const int n = face_axis(d.wall);
    const int t = wall_tangent_axis(d.wall);
    const double plane = s.plane(d.wall);
    if (plane < o.min[n] - 0.2 || plane > o.max[n] + 0.2) continue;
    if (o.max[t] < d.a0 - 0.2 || o.min[t] > d.a1 + 0.2) continue;
    if (o.max.y() < d.y0 - 0.2 || o.min.y() > d.y1 + 0.2) continue;
    return false;
  }
  return true;
}

}  // namespace

bool is_wall(RoomFace f) { return face_axis(f) != 1; }

double SceneSpec::plane(RoomFace f) const {
  const int a = face_axis(f);
  return face_is_max(f) ? room_max[a] : room_min[a];
}

void SceneSpec::validate() const {
  camera.validate();
  for (int a = 0; a < 3; ++a) {
    if (!(room_max[a] > room_min[a])) throw DataError("scene: empty room box");
  }
  if (!(wall_thickness > 0.0)) throw DataError("scene: wall thickness must be positive");
  const Eigen::Vector3d cam = camera_to_world.translation();
  if (!inside_closed(cam, room_min, room_max, -kTol)) {
    throw DataError("scene: camera must be strictly inside the room");
  }
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    if (o.label == kEmpty || o.label >= kClassCount) {
      throw DataError("scene: object " + std::to_string(i) + " has an invalid class");
    }
    for (int a = 0; a < 3; ++a) {
      if (!(o.max[a] > o.min[a])) throw DataError("scene: degenerate object box");
    }
    if (!inside_closed(o.min, room_min, room_max, kTol) ||
        !inside_closed(o.max, room_min, room_max, kTol)) {
      throw DataError("scene: object " + std::to_string(i) + " leaves the room");
    }
    if (inside_closed(cam, o.min, o.max, kTol)) {
      throw DataError("scene: camera inside object " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < decals.size(); ++i) {
    const auto& d = decals[i];
    if (!is_wall(d.wall)) throw DataError("scene: decal not on a wall");
    const int t = wall_tangent_axis(d.wall);
    if (!(d.a1 > d.a0) || !(d.y1 > d.y0) || d.a0 < room_min[t] - kTol ||
        d.a1 > room_max[t] + kTol || d.y0 < room_min.y() - kTol ||
        d.y1 > room_max.y() + kTol) {
      throw DataError("scene: decal " + std::to_string(i) + " exceeds its wall");
    }
  }
}

bool operator==(const SceneSpec& a, const SceneSpec& b) {
  return a.room_min == b.room_min && a.room_max == b.room_max &&
         a.wall_thickness == b.wall_thickness && a.wall_albedo == b.wall_albedo &&
         a.floor_albedo == b.floor_albedo && a.ceiling_albedo == b.ceiling_albedo &&
         a.camera == b.camera &&
         a.camera_to_world.rotation() == b.camera_to_world.rotation() &&
         a.camera_to_world.translation() == b.camera_to_world.translation() &&
         a.objects == b.objects && a.decals == b.decals;
}

double snap_to_desk_center(double meters) {
  return 0.04 + kDeskVoxel * std::round((meters - 0.04) / kDeskVoxel);
}

CameraIntrinsics default_camera() {
  CameraIntrinsics k;
  k.width = 160;
  k.height = 120;
  k.fx = k.fy = 80.0 / std::tan(M_PI / 6.0);
  k.cx = 79.5;
  k.cy = 59.5;
  return k;
}

RigidTransform look_transform(const Eigen::Vector3d& position, double yaw, double pitch) {
  const Eigen::Vector3d forward(std::sin(yaw) * std::cos(pitch), -std::sin(pitch),
                                std::cos(yaw) * std::cos(pitch));
  const Eigen::Vector3d world_down(0.0, -1.0, 0.0);
  const Eigen::Vector3d down =
      (world_down - world_down.dot(forward) * forward).normalized();
  const Eigen::Vector3d right = down.cross(forward);
  Eigen::Matrix3d r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  return RigidTransform(r, position);
}

SceneSpec generate_scene(std::uint64_t seed, double difficulty) {
  difficulty = std::isfinite(difficulty) ? std::clamp(difficulty, 0.0, 1.0) : 0.0;
  Rng rng(seed);
  SceneSpec s;
  s.room_min = {snap_to_desk_center(rng.uniform(0.2, 0.6)),
                snap_to_desk_center(rng.uniform(0.1, 0.3)),
                snap_to_desk_center(rng.uniform(0.1, 0.3))};
  s.room_max = {snap_to_desk_center(rng.uniform(4.2, 4.6)),
                snap_to_desk_center(rng.uniform(2.5, 2.7)),
                snap_to_desk_center(rng.uniform(3.6, 4.6))};
  s.wall_albedo = rng.color(0.75, 0.92);
  s.floor_albedo = rng.color(0.35, 0.6);
  s.ceiling_albedo = rng.color(0.85, 0.95);
  s.camera = default_camera();
  const Eigen::Vector3d cam(0.5 * (s.room_min.x() + s.room_max.x()) + rng.uniform(-0.5, 0.5),
                            s.room_min.y() + rng.uniform(1.2, 1.6),
                            s.room_min.z() + rng.uniform(0.15, 0.35));
  s.camera_to_world = look_transform(cam, rng.uniform(-0.25, 0.25), rng.uniform(0.15, 0.35));

  const int count = static_cast<int>(std::lround(difficulty * rng.uniform(3.0, 7.0)));
  for (int i = 0; i < count; ++i) {
    const ObjectTemplate& tpl = pick_template(rng);
    for (int attempt = 0; attempt < 40; ++attempt) {
      auto b = propose(s, tpl, rng);
      if (b && object_allowed(s, *b)) {
        s.objects.push_back(*b);
        break;
      }
    }
  }
  if (rng.chance(0.8 * difficulty)) {
    const int n = rng.chance(0.4) ? 2 : 1;
    for (int i = 0; i < n; ++i) {
      s.decals.push_back(random_decal(s, rng, kVisibleWalls[rng.integer(0, 2)]));
    }
  }
  s.validate();
  return s;
}

SceneSpec strip_decals(const SceneSpec& scene) {
  SceneSpec s = scene;
  s.decals.clear();
  return s;
}

SceneSpec ensure_decal(const SceneSpec& scene, std::uint64_t seed) {
  for (const auto& d : scene.decals) {
    if (decal_fully_visible(scene, d)) return scene;
  }
  Rng rng(seed ^ 0x5ca1ab1e0ddba11ull);
  for (int attempt = 0; attempt < 400; ++attempt) {
    const RoomFace wall = attempt % 2 == 0 ? RoomFace::kWallMaxZ : kVisibleWalls[rng.integer(0, 2)];
    const Decal d = random_decal(scene, rng, wall);
    if (decal_fully_visible(scene, d)) {
      SceneSpec s = scene;
      s.decals.push_back(d);
      s.validate();
      return s;
    }
  }
  throw DataError("ensure_decal: no fully visible wall spot found");
}

RayHit cast_ray(const SceneSpec& scene, const Eigen::Vector3d& origin,
                const Eigen::Vector3d& dir) {
  RayHit hit;
  hit.t = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (dir[a] == 0.0) continue;
    const bool to_max = dir[a] > 0.0;
    const double plane = to_max ? scene.room_max[a] : scene.room_min[a];
    const double t = (plane - origin[a]) / dir[a];
    if (t > 0.0 && t < hit.t) {
      hit.t = t;
      hit.surface = 2 * a + (to_max ? 1 : 0);
      hit.axis = a;
    }
  }
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const SceneBox& b = scene.objects[i];
    double t_near = -std::numeric_limits<double>::infinity();
    double t_far = std::numeric_limits<double>::infinity();
    int near_axis = 0;
    bool miss = false;
    for (int a = 0; a < 3 && !miss; ++a) {
      if (dir[a] == 0.0) {
        miss = origin[a] < b.min[a] || origin[a] > b.max[a];
        continue;
      }
      double t0 = (b.min[a] - origin[a]) / dir[a];
      double t1 = (b.max[a] - origin[a]) / dir[a];
      if (t0 > t1) std::swap(t0, t1);
      if (t0 > t_near) {
        t_near = t0;
        near_axis = a;
      }
      t_far = std::min(t_far, t1);
    }
    if (miss || t_near > t_far || !(t_near > 0.0) || t_near >= hit.t) continue;
    hit.t = t_near;
    hit.surface = kRoomFaces + static_cast<int>(i);
    hit.axis = near_axis;
  }
  hit.point = origin + hit.t * dir;
  if (hit.surface >= 0 && hit.surface < kRoomFaces) {
    const auto face = static_cast<RoomFace>(hit.surface);
    hit.point[hit.axis] = scene.plane(face);
    if (is_wall(face)) {
      const int t = wall_tangent_axis(face);
      for (std::size_t i = 0; i < scene.decals.size(); ++i) {
        const Decal& d = scene.decals[i];
        if (d.wall == face && decal_contains(d, hit.point[t], hit.point.y(), 0.0)) {
          hit.decal = static_cast<int>(i);
        }
      }
    }
  }
  return hit;
}

bool point_visible(const SceneSpec& scene, const Eigen::Vector3d& p, double eps) {
  const Eigen::Vector3d c = scene.camera_to_world.inverse().apply(p);
  if (c.z() <= 0.0) return false;
  const Eigen::Vector2d uv = project_point(c, scene.camera);
  if (!scene.camera.contains_pixel(uv.x(), uv.y())) return false;
  const Eigen::Vector3d o = scene.camera_to_world.translation();
  const Eigen::Vector3d dir = p - o;
  const RayHit hit = cast_ray(scene, o, dir);
  return hit.t >= 1.0 - eps / dir.norm();
}

Sample render(const SceneSpec& scene, const VoxelGridSpec& grid) {
  scene.validate();
  grid.validate();
  const CameraIntrinsics& k = scene.camera;
  Sample out;
  out.camera = k;
  out.camera_to_world = scene.camera_to_world;
  out.rgb = RgbImage(k.width, k.height);
  out.depth = DepthMap(k.width, k.height);
  out.decal_mask = EdgeMask(k.width, k.height);
  out.surface = Raster<int, SurfaceIdTag>(k.width, k.height, -1);
  const Eigen::Matrix3d& rot = scene.camera_to_world.rotation();
  const Eigen::Vector3d origin = scene.camera_to_world.translation();

  parallel_for(0, static_cast<std::size_t>(k.height), [&](std::size_t row) {
    const int v = static_cast<int>(row);
    for (int u = 0; u < k.width; ++u) {
      const Eigen::Vector3d dir_cam((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      const RayHit hit = cast_ray(scene, origin, rot * dir_cam);
      // The camera-frame ray has unit z, so t is the depth along the axis.
      out.depth(u, v) = std::round(hit.t * 1000.0) / 1000.0;
      out.surface(u, v) = hit.surface;
      double normal_sign = 0.0;
      Rgb albedo;
      if (hit.surface >= kRoomFaces) {
        const SceneBox& b = scene.objects[hit.surface - kRoomFaces];
        albedo = b.albedo;
        normal_sign = (rot * dir_cam)[hit.axis] > 0.0 ? -1.0 : 1.0;
      } else {
        const auto face = static_cast<RoomFace>(hit.surface);
        normal_sign = face_is_max(face) ? -1.0 : 1.0;
        albedo = face == RoomFace::kFloor     ? scene.floor_albedo
                 : face == RoomFace::kCeiling ? scene.ceiling_albedo
                                              : scene.wall_albedo;
        if (hit.decal >= 0) {
          albedo = scene.decals[hit.decal].color;
          out.decal_mask(u, v) = 1;
        }
      }
      out.rgb(u, v) = shaded(albedo, shade(hit.axis, normal_sign));
    }
  });

  out.gt = LabelVolume(grid, kEmpty);
  out.room = BinaryVolume(grid, 0);
  const Eigen::Vector3d th = Eigen::Vector3d::Constant(scene.wall_thickness);
  const Eigen::Vector3d shell_lo = scene.room_min - th;
  const Eigen::Vector3d shell_hi = scene.room_max + th;
  const double half = 0.5 * grid.voxel_size;
  parallel_for(0, static_cast<std::size_t>(grid.dims[2]), [&](std::size_t zi) {
    const int z = static_cast<int>(zi);
    for (int y = 0; y < grid.dims[1]; ++y) {
      for (int x = 0; x < grid.dims[0]; ++x) {
        const Eigen::Vector3d c = grid.voxel_center({x, y, z});
        if (!inside_closed(c, shell_lo, shell_hi, kTol)) continue;
        out.room(x, y, z) = 1;
        std::uint8_t label = kEmpty;
        const bool interior = inside_closed(c, scene.room_min, scene.room_max, -kTol);
        if (!interior) {
          if (c.y() <= scene.room_min.y() + kTol) {
            label = kFloor;
          } else if (c.y() >= scene.room_max.y() - kTol) {
            label = kCeiling;
          } else {
            label = kWall;
            for (const Decal& d : scene.decals) {
              const int n = face_axis(d.wall);
              const double offset = c[n] - scene.plane(d.wall);
              const bool outward = face_is_max(d.wall) ? offset >= -kTol : offset <= kTol;
              if (outward && std::abs(offset) <= half + kTol &&
                  decal_contains(d, c[wall_tangent_axis(d.wall)], c.y(), kTol)) {
                label = kObjects;
              }
            }
          }
        }
        for (const SceneBox& b : scene.objects) {
          if (inside_closed(c, b.min, b.max, kTol)) {
            label = b.label;
            break;
          }
        }
        out.gt(x, y, z) = label;
      }
    }
  });
  return out;
}

std::vector<std::pair<int, int>> mask_boundary(const EdgeMask& mask) {
  std::vector<std::pair<int, int>> out;
  for (int v = 0; v < mask.height(); ++v) {
    for (int u = 0; u < mask.width(); ++u) {
      if (!mask(u, v)) continue;
      const bool border = !mask.contains(u - 1, v) || !mask.contains(u + 1, v) ||
                          !mask.contains(u, v - 1) || !mask.contains(u, v + 1);
      if (border || !mask(u - 1, v) || !mask(u + 1, v) || !mask(u, v - 1) ||
          !mask(u, v + 1)) {
        out.emplace_back(u, v);
      }
    }
  }
  return out;
}

}  // namespace voxelforge
