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

#ifndef VOXELFORGE_OCCUPANCY_HPP_
#define VOXELFORGE_OCCUPANCY_HPP_

#include <cstddef>
#include <cstdint>

#include "voxelforge/labels.hpp"
#include "voxelforge/tsdf.hpp"
#include "voxelforge/volume.hpp"

namespace voxelforge {

enum class OccupancyState : std::uint8_t {
  kOther = 0,
  kOccupiedIn = 1,       // non-empty ground truth inside room and view
  kOccludedFreeIn = 2,   // empty, occluded, inside room
};

/// Which evaluation set a voxel belongs to. Scene completion scores
/// kOccluded voxels; semantic completion scores kVisibleSurface and
/// kOccluded (optionally kVisibleFree too).
enum class EvalRegion : std::uint8_t {
  kExcluded = 0,  // outside room or view, or ground truth ignored
  kVisibleFree = 1,
  kVisibleSurface = 2,
  kOccluded = 3,
};

struct OccupancyGrid {
  Volume<OccupancyState> state;
  Volume<EvalRegion> region;

  const VoxelGridSpec& spec() const { return state.spec(); }

  /// One byte per voxel: state in bits 0-1, region in bits 2-3.
  Volume<std::uint8_t> pack() const;
  static OccupancyGrid unpack(const Volume<std::uint8_t>& packed);

  std::size_t count(OccupancyState s) const;
};

/// Throws DataError when the volumes do not share one grid.
OccupancyGrid build_occupancy_grid(const LabelVolume& gt,
                                   const VisibilityVolume& vis,
                                   const BinaryVolume& room);

/// Ground truth with kIgnore wherever the voxel is outside the room or the
/// camera view.
LabelVolume mask_ignored(const LabelVolume& gt, const VisibilityVolume& vis,
                         const BinaryVolume& room);

struct WeightTensor {
  Volume<std::uint8_t> values;  // 0 or 1
  double ratio = 0.0;           // keep probability for occluded free voxels
  std::size_t occupied = 0;
  std::size_t occluded_total = 0;
  std::size_t occluded_kept = 0;
};

/// w = occu + occl * rand_occl, where rand_occl keeps each occluded free
/// voxel independently with probability r = min(1, 2 sum(occu) / sum(occl)).
/// Deterministic for a given seed. With no occluded voxels only occupied
/// voxels get weight.
WeightTensor balance_weights(const OccupancyGrid& grid, std::uint64_t seed);

/// Seed for one training draw, mixed from the run seed and counters.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Block reductions from the input resolution to the network output
// resolution. `factor` must divide every grid dimension.

/// Empty when more than 95% of the block's known voxels are empty,
/// otherwise the most frequent non-empty class (ties go to the higher class
/// index). Blocks made only of kIgnore stay kIgnore.
LabelVolume downsample_labels(const LabelVolume& labels, int factor);

/// kOccupied if any voxel is occupied; kOutsideView if all are outside;
/// otherwise the majority of kVisibleFree vs kOccluded (ties occluded).
VisibilityVolume downsample_visibility(const VisibilityVolume& vis, int factor);

/// Occupied if any voxel in the block is.
BinaryVolume downsample_any(const BinaryVolume& volume, int factor);

}  // namespace voxelforge

#endif  // VOXELFORGE_OCCUPANCY_HPP_
