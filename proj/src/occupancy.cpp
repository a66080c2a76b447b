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

#include "voxelforge/occupancy.hpp"

#include <algorithm>
#include <array>
#include <random>

#include "voxelforge/errors.hpp"

namespace voxelforge {
namespace {

// Visits every fine voxel of each coarse block and hands the block's values
// to `reduce`, which returns the coarse value.
template <typename T, typename Reduce>
Volume<T> block_reduce(const Volume<T>& fine, int factor, Reduce&& reduce) {
  const VoxelGridSpec coarse_spec = fine.spec().downsampled(factor);
  Volume<T> coarse(coarse_spec);
  std::vector<T> block;
  block.reserve(static_cast<std::size_t>(factor) * factor * factor);
  for (int z = 0; z < coarse_spec.dims[2]; ++z) {
    for (int y = 0; y < coarse_spec.dims[1]; ++y) {
      for (int x = 0; x < coarse_spec.dims[0]; ++x) {
        block.clear();
        for (int dz = 0; dz < factor; ++dz) {
          for (int dy = 0; dy < factor; ++dy) {
            for (int dx = 0; dx < factor; ++dx) {
              block.push_back(fine(x * factor + dx, y * factor + dy, z * factor + dz));
            }
          }
        }
        coarse(x, y, z) = reduce(block);
      }
    }
  }
  return coarse;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

Volume<std::uint8_t> OccupancyGrid::pack() const {
  Volume<std::uint8_t> out(state.spec(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(static_cast<unsigned>(state[i]) |
                                       (static_cast<unsigned>(region[i]) << 2));
  }
  return out;
}

OccupancyGrid OccupancyGrid::unpack(const Volume<std::uint8_t>& packed) {
  OccupancyGrid grid{Volume<OccupancyState>(packed.spec()),
                     Volume<EvalRegion>(packed.spec())};
  for (std::size_t i = 0; i < packed.size(); ++i) {
    const unsigned s = packed[i] & 0x3u;
    const unsigned r = (packed[i] >> 2) & 0x3u;
    if (s > 2 || (packed[i] >> 4) != 0) {
      throw DataError("invalid occupancy grid code");
    }
    grid.state[i] = static_cast<OccupancyState>(s);
    grid.region[i] = static_cast<EvalRegion>(r);
  }
  return grid;
}

std::size_t OccupancyGrid::count(OccupancyState s) const {
  const auto v = state.values();
  return static_cast<std::size_t>(std::count(v.begin(), v.end(), s));
}

OccupancyGrid build_occupancy_grid(const LabelVolume& gt,
                                   const VisibilityVolume& vis,
                                   const BinaryVolume& room) {
  require_same_spec(gt.spec(), vis.spec(), "build_occupancy_grid");
  require_same_spec(gt.spec(), room.spec(), "build_occupancy_grid");
  OccupancyGrid grid{Volume<OccupancyState>(gt.spec(), OccupancyState::kOther),
                     Volume<EvalRegion>(gt.spec(), EvalRegion::kExcluded)};
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const std::uint8_t label = gt[i];
    const Visibility v = vis[i];
    const bool in_room = room[i] != 0;
    const bool in_view = v != Visibility::kOutsideView;
    if (label == kIgnore || !in_room || !in_view) continue;

    if (label != kEmpty) {
      grid.state[i] = OccupancyState::kOccupiedIn;
    } else if (v == Visibility::kOccluded) {
      grid.state[i] = OccupancyState::kOccludedFreeIn;
    }
    switch (v) {
      case Visibility::kVisibleFree: grid.region[i] = EvalRegion::kVisibleFree; break;
      case Visibility::kOccupied: grid.region[i] = EvalRegion::kVisibleSurface; break;
      case Visibility::kOccluded: grid.region[i] = EvalRegion::kOccluded; break;
      case Visibility::kOutsideView: break;
    }
  }
  return grid;
}

LabelVolume mask_ignored(const LabelVolume& gt, const VisibilityVolume& vis,
                         const BinaryVolume& room) {
  require_same_spec(gt.spec(), vis.spec(), "mask_ignored");
  require_same_spec(gt.spec(), room.spec(), "mask_ignored");
  LabelVolume out = gt;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!room[i] || vis[i] == Visibility::kOutsideView) out[i] = kIgnore;
  }
  return out;
}

WeightTensor balance_weights(const OccupancyGrid& grid, std::uint64_t seed) {
  WeightTensor w;
  w.values = Volume<std::uint8_t>(grid.spec(), 0);
  w.occupied = grid.count(OccupancyState::kOccupiedIn);
  w.occluded_total = grid.count(OccupancyState::kOccludedFreeIn);
  w.ratio = w.occluded_total == 0
                ? 0.0
                : std::min(1.0, 2.0 * static_cast<double>(w.occupied) /
                                    static_cast<double>(w.occluded_total));

  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    const OccupancyState s = grid.state[i];
    if (s == OccupancyState::kOccupiedIn) {
      w.values[i] = 1;
    } else if (s == OccupancyState::kOccludedFreeIn) {
      // 53-bit uniform in [0, 1); portable unlike std distributions.
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (u < w.ratio) {
        w.values[i] = 1;
        ++w.occluded_kept;
      }
    }
  }
  return w;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xD1B54A32D192ED03ull));
}

LabelVolume downsample_labels(const LabelVolume& labels, int factor) {
  return block_reduce(labels, factor, [](const std::vector<std::uint8_t>& block) {
    std::array<int, kClassCount> counts{};
    int known = 0;
    for (std::uint8_t c : block) {
      if (c == kIgnore) continue;
      if (c >= kClassCount) throw DataError("label out of range");
      ++counts[c];
      ++known;
    }
    if (known == 0) return kIgnore;
    const int occupied = known - counts[kEmpty];
    if (static_cast<double>(counts[kEmpty]) > 0.95 * known || occupied == 0) {
      return kEmpty;
    }
    int best = 1;
    for (int c = 2; c < kClassCount; ++c) {
      if (counts[c] >= counts[best]) best = c;
    }
    return static_cast<std::uint8_t>(best);
  });
}

VisibilityVolume downsample_visibility(const VisibilityVolume& vis, int factor) {
  return block_reduce(vis, factor, [](const std::vector<Visibility>& block) {
    int free = 0;
    int occluded = 0;
    for (Visibility v : block) {
      if (v == Visibility::kOccupied) return Visibility::kOccupied;
      if (v == Visibility::kVisibleFree) ++free;
      if (v == Visibility::kOccluded) ++occluded;
    }
    if (free == 0 && occluded == 0) return Visibility::kOutsideView;
    return free > occluded ? Visibility::kVisibleFree : Visibility::kOccluded;
  });
}

BinaryVolume downsample_any(const BinaryVolume& volume, int factor) {
  return block_reduce(volume, factor, [](const std::vector<std::uint8_t>& block) {
    return static_cast<std::uint8_t>(
        std::any_of(block.begin(), block.end(), [](std::uint8_t b) { return b != 0; }));
  });
}

}  // namespace voxelforge
