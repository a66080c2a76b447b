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

#ifndef VOXELFORGE_IO_HPP_
#define VOXELFORGE_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "voxelforge/geometry.hpp"
#include "voxelforge/labels.hpp"
#include "voxelforge/raster.hpp"
#include "voxelforge/tsdf.hpp"
#include "voxelforge/volume.hpp"

namespace voxelforge {

// EVOX container: "EVOX", u32 version, u32 dtype, u32 nx, ny, nz,
// f64 origin x, y, z, f64 voxel_size, then the values little endian in
// x-fastest order.
inline constexpr std::uint32_t kVolumeVersion = 1;
inline constexpr std::size_t kVolumeHeaderBytes = 56;

enum class VolumeDtype : std::uint32_t { kU8 = 1, kF32 = 2 };

void write_volume(const std::filesystem::path& path, const Volume<std::uint8_t>& v);
void write_volume(const std::filesystem::path& path, const Volume<float>& v);
/// Throws FormatError (bad magic, version, dtype or truncated data).
Volume<std::uint8_t> read_volume_u8(const std::filesystem::path& path);
Volume<float> read_volume_f32(const std::filesystem::path& path);
VolumeDtype read_volume_dtype(const std::filesystem::path& path);

/// Binary PPM (P6), 8 bits per channel; channels are rounded to 1/255.
void write_ppm(const std::filesystem::path& path, const RgbImage& img);
RgbImage read_ppm(const std::filesystem::path& path);

inline constexpr double kMaxStoredDepth = 65.535;

/// Binary 16-bit PGM (P5, big endian) in millimeters. Returns the number of
/// pixels clamped to 65535 mm.
std::size_t write_depth_pgm(const std::filesystem::path& path, const DepthMap& depth);
DepthMap read_depth_pgm(const std::filesystem::path& path);

/// Intrinsics and camera-to-world pose as JSON.
void write_camera_json(const std::filesystem::path& path, const CameraIntrinsics& k,
                       const RigidTransform& camera_to_world);
std::pair<CameraIntrinsics, RigidTransform> read_camera_json(
    const std::filesystem::path& path);

/// ASCII PLY with one cube (8 vertices, 12 triangles) per exported voxel.
/// Label volumes export classes 1..11 with the class palette; scalar
/// volumes export voxels with value >= threshold colored by value. Returns
/// the number of exported voxels.
std::size_t export_ply(const std::filesystem::path& path, const LabelVolume& labels);
std::size_t export_ply(const std::filesystem::path& path, const Volume<float>& values,
                       double threshold);

/// One manifest line: paths (relative to the manifest) of the sample files.
struct ManifestEntry {
  std::string rgb;
  std::string depth;
  std::string gt;
  std::string room;
  std::string camera;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries);
/// Blank lines and lines starting with '#' are skipped. Throws DataError
/// on lines without exactly five fields.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

}  // namespace voxelforge

#endif  // VOXELFORGE_IO_HPP_
