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

#ifndef VOXELFORGE_METRICS_HPP_
#define VOXELFORGE_METRICS_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "voxelforge/labels.hpp"
#include "voxelforge/occupancy.hpp"

namespace voxelforge {

/// A ratio that is std::nullopt when its denominator is zero.
using Ratio = std::optional<double>;

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  Ratio precision() const;
  Ratio recall() const;
  Ratio iou() const;
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

struct SceneCompletion {
  ConfusionCounts counts;
  Ratio precision;
  Ratio recall;
  Ratio iou;
};

enum class SemanticDomain {
  kSurfaceAndOccluded,  // visible surface plus occluded voxels
  kAllInView,           // additionally visible free space
};

struct SemanticIou {
  std::array<ConfusionCounts, 11> counts;  // classes 1..11
  std::array<Ratio, 11> per_class;         // nullopt when absent from both
  Ratio average;                           // mean over defined classes
};

/// Binary occupied-vs-empty scores over occluded, in-room, in-view voxels.
SceneCompletion scene_completion(const LabelVolume& pred, const LabelVolume& gt,
                                 const OccupancyGrid& grid);

/// Per-class IoU over the chosen evaluation domain.
SemanticIou semantic_iou(const LabelVolume& pred, const LabelVolume& gt,
                         const OccupancyGrid& grid,
                         SemanticDomain domain = SemanticDomain::kSurfaceAndOccluded);

struct EvalReport {
  SceneCompletion sc;
  SemanticIou ssc;
  std::size_t samples = 0;
};

/// Accumulates confusion counts across samples, then derives ratios.
class EvalAccumulator {
 public:
  explicit EvalAccumulator(SemanticDomain domain = SemanticDomain::kSurfaceAndOccluded)
      : domain_(domain) {}
  void add(const LabelVolume& pred, const LabelVolume& gt, const OccupancyGrid& grid);
  EvalReport report() const;

 private:
  SemanticDomain domain_;
  ConfusionCounts sc_;
  std::array<ConfusionCounts, 11> classes_{};
  std::size_t samples_ = 0;
};

EvalReport finalize_report(const ConfusionCounts& sc,
                           const std::array<ConfusionCounts, 11>& classes,
                           std::size_t samples);

/// Human readable table; ratios in percent.
std::string format_report_table(const EvalReport& report);
/// key=value lines ("prec.", "rec.", "IoU", class columns, "avg."); ratios
/// in [0, 1] and "undefined" for 0/0.
std::string format_report_kv(const EvalReport& report);

}  // namespace voxelforge

#endif  // VOXELFORGE_METRICS_HPP_
