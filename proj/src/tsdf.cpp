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

#include "voxelforge/tsdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "voxelforge/errors.hpp"
#include "voxelforge/parallel.hpp"

namespace voxelforge {
namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

// One lower-envelope pass (Felzenszwalb & Huttenlocher) over a strided line.
// f holds squared distances or kInf; the result replaces f in place.
// Scratch buffers are sized by the caller to at least n (+1 for z).
void envelope_pass(std::int64_t* f, int n, std::size_t stride,
                   std::vector<std::int64_t>& line, std::vector<int>& sites,
                   std::vector<double>& bounds) {
  for (int i = 0; i < n; ++i) line[i] = f[i * stride];

  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (line[q] == kInf) continue;
    const double fq = static_cast<double>(line[q]) + static_cast<double>(q) * q;
    double s = -std::numeric_limits<double>::infinity();
    while (k >= 0) {
      const int v = sites[k];
      const double fv = static_cast<double>(line[v]) + static_cast<double>(v) * v;
      s = (fq - fv) / (2.0 * (q - v));
      if (s > bounds[k]) break;
      --k;
    }
    ++k;
    sites[k] = q;
    bounds[k] = k == 0 ? -std::numeric_limits<double>::infinity() : s;
  }
  if (k < 0) return;  // no finite site on this line; leave it at infinity

  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (j < k && bounds[j + 1] < q) ++j;
    const std::int64_t d = q - sites[j];
    f[q * stride] = d * d + line[sites[j]];
  }
}

}  // namespace

VisibilityVolume compute_visibility(const DepthMap& depth,
                                    const CameraIntrinsics& k,
                                    const RigidTransform& camera_to_world,
                                    const VoxelGridSpec& spec,
                                    const BinaryVolume& occupied) {
  k.validate();
  if (depth.width() != k.width || depth.height() != k.height) {
    throw DataError("depth map size does not match camera intrinsics");
  }
  require_same_spec(spec, occupied.spec(), "compute_visibility");

  const RigidTransform world_to_camera = camera_to_world.inverse();
  const double half = 0.5 * spec.voxel_size;
  VisibilityVolume vis(spec, Visibility::kOutsideView);
  const int nx = spec.dims[0];
  const int ny = spec.dims[1];
  parallel_for(0, static_cast<std::size_t>(spec.dims[2]), [&](std::size_t zi) {
    const int z = static_cast<int>(zi);
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        const Eigen::Vector3d pc =
            world_to_camera.apply(spec.voxel_center({x, y, z}));
        if (!(pc.z() > 0.0)) continue;
        const Eigen::Vector2d uv = project_point(pc, k);
        const double u = std::floor(uv.x() + 0.5);
        const double v = std::floor(uv.y() + 0.5);
        if (!(u >= 0.0 && v >= 0.0 && u < k.width && v < k.height)) continue;
        const double observed = depth(static_cast<int>(u), static_cast<int>(v));
        if (!(observed > 0.0)) continue;
        Visibility label;
        if (pc.z() < observed - half) {
          label = Visibility::kVisibleFree;
        } else if (pc.z() > observed + half) {
          label = Visibility::kOccluded;
        } else {
          label = occupied(x, y, z) ? Visibility::kOccupied
                                    : Visibility::kVisibleFree;
        }
        vis(x, y, z) = label;
      }
    }
  });
  return vis;
}

DistanceVolume edt3_squared(const BinaryVolume& occupied) {
  const VoxelGridSpec& spec = occupied.spec();
  const auto values = occupied.values();
  if (std::none_of(values.begin(), values.end(),
                   [](std::uint8_t b) { return b != 0; })) {
    throw EmptyVolumeError("distance transform of a volume with no occupied voxel");
  }

  const int nx = spec.dims[0];
  const int ny = spec.dims[1];
  const int nz = spec.dims[2];
  std::vector<std::int64_t> f(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) f[i] = values[i] ? 0 : kInf;

  const int longest = std::max({nx, ny, nz});
  const std::size_t sx = 1;
  const std::size_t sy = static_cast<std::size_t>(nx);
  const std::size_t sz = static_cast<std::size_t>(nx) * ny;

  // Each pass touches disjoint lines, so the result does not depend on how
  // lines are distributed over workers.
  auto run_pass = [&](std::size_t lines, int n, std::size_t stride,
                      auto&& line_start) {
    const std::size_t workers = static_cast<std::size_t>(worker_count());
    const std::size_t chunk = (lines + workers - 1) / workers;
    parallel_for(0, workers, [&](std::size_t w) {
      std::vector<std::int64_t> line(longest);
      std::vector<int> sites(longest);
      std::vector<double> bounds(longest + 1);
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(lines, lo + chunk);
      for (std::size_t l = lo; l < hi; ++l) {
        envelope_pass(f.data() + line_start(l), n, stride, line, sites, bounds);
      }
    });
  };

  run_pass(static_cast<std::size_t>(ny) * nz, nx, sx,
           [&](std::size_t l) { return l * sy; });
  run_pass(static_cast<std::size_t>(nx) * nz, ny, sy, [&](std::size_t l) {
    return (l / nx) * sz + (l % nx);
  });
  run_pass(static_cast<std::size_t>(nx) * ny, nz, sz,
           [&](std::size_t l) { return l; });

  DistanceVolume out(spec, 0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = static_cast<std::uint32_t>(f[i]);
  }
  return out;
}

TsdfVolume tsdf_from_distance(const DistanceVolume& dist2,
                              const VisibilityVolume& vis, double truncation,
                              TsdfChannel channel) {
  if (!(truncation > 0.0)) throw std::invalid_argument("truncation must be positive");
  require_same_spec(dist2.spec(), vis.spec(), "tsdf_encode");
  const double scale = dist2.spec().voxel_size / truncation;
  TsdfVolume out{Volume<float>(dist2.spec(), 0.0f), TsdfKind::kTsdf, channel};
  for (std::size_t i = 0; i < dist2.size(); ++i) {
    if (dist2[i] == 0) continue;
    const double magnitude =
        std::min(scale * std::sqrt(static_cast<double>(dist2[i])), 1.0);
    const Visibility label = vis[i];
    const bool positive =
        label == Visibility::kVisibleFree || label == Visibility::kOccupied;
    out.values[i] = static_cast<float>(positive ? magnitude : -magnitude);
  }
  return out;
}

TsdfVolume tsdf_encode(const BinaryVolume& occupied, const VisibilityVolume& vis,
                       double truncation, TsdfChannel channel) {
  if (!(truncation > 0.0)) throw std::invalid_argument("truncation must be positive");
  return tsdf_from_distance(edt3_squared(occupied), vis, truncation, channel);
}

TsdfVolume flip_tsdf(const TsdfVolume& v) {
  if (v.kind != TsdfKind::kTsdf) {
    throw std::invalid_argument("volume is already flipped");
  }
  TsdfVolume out{Volume<float>(v.values.spec()), TsdfKind::kFlipped, v.channel};
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    out.values[i] = flip_value(v.values[i]);
  }
  return out;
}

ChannelEncoding encode_channel(const PointCloud& points,
                               const VisibilityVolume& vis,
                               const VoxelGridSpec& spec, double truncation,
                               TsdfChannel channel) {
  require_same_spec(spec, vis.spec(), "encode_channel");
  VoxelizeResult vox = voxelize(points, spec);
  ChannelEncoding out;
  out.dropped_points = vox.dropped;
  const auto occ = vox.occupancy.values();
  out.occupied_voxels = static_cast<std::size_t>(
      std::count_if(occ.begin(), occ.end(), [](std::uint8_t b) { return b != 0; }));
  if (out.occupied_voxels == 0) {
    out.empty = true;
    out.volume = TsdfVolume{Volume<float>(spec, 0.0f), TsdfKind::kFlipped, channel};
    return out;
  }
  out.volume = flip_tsdf(tsdf_encode(vox.occupancy, vis, truncation, channel));
  return out;
}

}  // namespace voxelforge
