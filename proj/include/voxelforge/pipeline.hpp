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

#ifndef VOXELFORGE_PIPELINE_HPP_
#define VOXELFORGE_PIPELINE_HPP_

#include <cstddef>
#include <filesystem>

#include "voxelforge/edges.hpp"
#include "voxelforge/geometry.hpp"
#include "voxelforge/labels.hpp"
#include "voxelforge/occupancy.hpp"
#include "voxelforge/scene.hpp"
#include "voxelforge/tsdf.hpp"

namespace voxelforge {

/// Offline preprocessing settings.
struct PreprocessParams {
  VoxelGridSpec grid = VoxelGridSpec::desk();
  CannyParams canny;
  double truncation = 0.24;  // meters
  int label_factor = 4;      // input / network output resolution
  bool all_room = false;     // treat every voxel as inside the room

  void validate() const;
};

/// Network-ready volumes of one RGB-D frame.
struct PreprocessedSample {
  TsdfVolume surface;  // flipped TSDF at input resolution
  TsdfVolume edge;     // flipped TSDF at input resolution
  LabelVolume gt;      // output resolution, kIgnore outside room or view
  OccupancyGrid grid;  // output resolution
  std::size_t edge_pixels = 0;
  std::size_t edge_missing_depth = 0;
  bool edge_empty = false;
};

/// RGB-D frame plus its ground truth as stored by the synth command.
struct Frame {
  RgbImage rgb;
  DepthMap depth;
  LabelVolume gt;
  BinaryVolume room;
  CameraIntrinsics camera;
  RigidTransform camera_to_world;
};

Frame frame_from_sample(const Sample& sample);

/// Surface and edge F-TSDF encoding, visibility, and the downsampled ground
/// truth and occupancy grid. Throws DataError on inconsistent inputs.
PreprocessedSample preprocess(const Frame& frame, const PreprocessParams& params);

/// Writes surface.evox, edge.evox, gt.evox and occ.evox into `dir`.
void write_preprocessed(const std::filesystem::path& dir, const PreprocessedSample& s);
PreprocessedSample read_preprocessed(const std::filesystem::path& dir);

}  // namespace voxelforge

#endif  // VOXELFORGE_PIPELINE_HPP_
