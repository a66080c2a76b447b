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

#ifndef VOXELFORGE_CHECKPOINT_HPP_
#define VOXELFORGE_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>

#include "voxelforge/network.hpp"

namespace voxelforge {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Writes "ENCK", the format version, the network configuration and every
/// parameter tensor in declaration order (rank, dims, then float32 little
/// endian values).
void save_checkpoint(const std::filesystem::path& path, const EdgeNet<float>& net);

/// Configuration stored in a checkpoint header.
NetworkConfig read_checkpoint_config(const std::filesystem::path& path);

/// Rebuilds the network described by the checkpoint and loads its weights.
/// Throws FormatError on a malformed file.
EdgeNet<float> load_checkpoint(const std::filesystem::path& path);

/// Loads weights into an existing network. Throws DataError when the
/// checkpoint's configuration or tensor shapes do not match `net`.
void load_checkpoint_into(const std::filesystem::path& path, EdgeNet<float>& net);

}  // namespace voxelforge

#endif  // VOXELFORGE_CHECKPOINT_HPP_
