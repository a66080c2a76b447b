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

#ifndef VOXELFORGE_LABELS_HPP_
#define VOXELFORGE_LABELS_HPP_

#include <array>
#include <cstdint>
#include <string_view>

#include "voxelforge/raster.hpp"
#include "voxelforge/volume.hpp"

namespace voxelforge {

// Semantic classes. 0 is empty space; 1..11 follow the usual SSC column
// order.
inline constexpr std::uint8_t kEmpty = 0;
inline constexpr std::uint8_t kCeiling = 1;
inline constexpr std::uint8_t kFloor = 2;
inline constexpr std::uint8_t kWall = 3;
inline constexpr std::uint8_t kWindow = 4;
inline constexpr std::uint8_t kChair = 5;
inline constexpr std::uint8_t kBed = 6;
inline constexpr std::uint8_t kSofa = 7;
inline constexpr std::uint8_t kTable = 8;
inline constexpr std::uint8_t kTvs = 9;
inline constexpr std::uint8_t kFurniture = 10;
inline constexpr std::uint8_t kObjects = 11;
inline constexpr std::uint8_t kIgnore = 255;

inline constexpr int kClassCount = 12;  // including empty

/// Report column names for classes 1..11.
inline constexpr std::array<std::string_view, 11> kClassColumns = {
    "ceil.", "floor", "wall", "win.", "chair", "bed",
    "sofa",  "table", "tvs",  "furn.", "objs."};

/// Display color per class 0..11 (index 0 unused for export).
extern const std::array<Rgb, kClassCount> kClassPalette;

/// Class index per voxel, or kIgnore.
using LabelVolume = Volume<std::uint8_t>;

}  // namespace voxelforge

#endif  // VOXELFORGE_LABELS_HPP_
