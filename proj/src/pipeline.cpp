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

#include "voxelforge/pipeline.hpp"

#include <stdexcept>

#include "voxelforge/errors.hpp"
#include "voxelforge/io.hpp"

namespace voxelforge {

void PreprocessParams::validate() const {
  grid.validate();
  canny.validate();
  if (!(truncation > 0.0)) throw std::invalid_argument("truncation must be positive");
  if (label_factor < 1) throw std::invalid_argument("label factor must be positive");
  for (int d : grid.dims) {
    if (d % label_factor != 0) {
      throw std::invalid_argument("grid dims must be divisible by the label factor");
    }
  }
}

Frame frame_from_sample(const Sample& sample) {
  return {sample.rgb, sample.depth, sample.gt, sample.room, sample.camera,
          sample.camera_to_world};
}

PreprocessedSample preprocess(const Frame& frame, const PreprocessParams& params) {
  params.validate();
  if (!frame.rgb.same_shape(frame.depth) || frame.depth.width() != frame.camera.width ||
      frame.depth.height() != frame.camera.height) {
    throw DataError("preprocess: image sizes do not match the camera");
  }
  require_same_spec(frame.gt.spec(), params.grid, "preprocess ground truth");
  require_same_spec(frame.room.spec(), params.grid, "preprocess room mask");

  PreprocessedSample out;
  const PointCloud surface_points =
      depth_to_point_cloud(frame.depth, frame.camera, frame.camera_to_world);
  const BinaryVolume surface_voxels = voxelize(surface_points, params.grid).occupancy;
  const VisibilityVolume vis = compute_visibility(frame.depth, frame.camera,
                                                  frame.camera_to_world, params.grid,
                                                  surface_voxels);
  out.surface = encode_channel(surface_points, vis, params.grid, params.truncation,
                               TsdfChannel::kSurface)
                    .volume;

  const EdgeMask edges = canny(frame.rgb, params.canny);
  for (std::uint8_t e : edges.values()) out.edge_pixels += e != 0;
  const EdgeProjection projection =
      edges_to_point_cloud(edges, frame.depth, frame.camera, frame.camera_to_world);
  out.edge_missing_depth = projection.missing_depth;
  ChannelEncoding edge = encode_channel(projection.cloud, vis, params.grid,
                                        params.truncation, TsdfChannel::kEdge);
  out.edge = std::move(edge.volume);
  out.edge_empty = edge.empty;

  const int f = params.label_factor;
  const LabelVolume gt_low = downsample_labels(frame.gt, f);
  const VisibilityVolume vis_low = downsample_visibility(vis, f);
  const BinaryVolume room_low = params.all_room
                                    ? BinaryVolume(gt_low.spec(), 1)
                                    : downsample_any(frame.room, f);
  out.grid = build_occupancy_grid(gt_low, vis_low, room_low);
  out.gt = mask_ignored(gt_low, vis_low, room_low);
  return out;
}

void write_preprocessed(const std::filesystem::path& dir, const PreprocessedSample& s) {
  std::filesystem::create_directories(dir);
  write_volume(dir / "surface.evox", s.surface.values);
  write_volume(dir / "edge.evox", s.edge.values);
  write_volume(dir / "gt.evox", s.gt);
  write_volume(dir / "occ.evox", s.grid.pack());
}

PreprocessedSample read_preprocessed(const std::filesystem::path& dir) {
  PreprocessedSample s;
  s.surface = {read_volume_f32(dir / "surface.evox"), TsdfKind::kFlipped,
               TsdfChannel::kSurface};
  s.edge = {read_volume_f32(dir / "edge.evox"), TsdfKind::kFlipped, TsdfChannel::kEdge};
  s.gt = read_volume_u8(dir / "gt.evox");
  s.grid = OccupancyGrid::unpack(read_volume_u8(dir / "occ.evox"));
  require_same_spec(s.surface.values.spec(), s.edge.values.spec(), dir.string().c_str());
  require_same_spec(s.gt.spec(), s.grid.spec(), dir.string().c_str());
  for (std::uint8_t c : s.gt.values()) {
    if (c >= kClassCount && c != kIgnore) throw DataError(dir.string() + ": bad label");
  }
  return s;
}

}  // namespace voxelforge
