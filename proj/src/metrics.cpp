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

#include "voxelforge/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "voxelforge/errors.hpp"

namespace voxelforge {
namespace {

Ratio ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

void check_inputs(const LabelVolume& pred, const LabelVolume& gt,
                  const OccupancyGrid& grid) {
  require_same_spec(pred.spec(), gt.spec(), "metrics");
  require_same_spec(pred.spec(), grid.spec(), "metrics");
}

bool in_semantic_domain(EvalRegion r, SemanticDomain domain) {
  switch (r) {
    case EvalRegion::kVisibleSurface:
    case EvalRegion::kOccluded:
      return true;
    case EvalRegion::kVisibleFree:
      return domain == SemanticDomain::kAllInView;
    case EvalRegion::kExcluded:
      return false;
  }
  return false;
}

ConfusionCounts sc_counts(const LabelVolume& pred, const LabelVolume& gt,
                          const OccupancyGrid& grid) {
  ConfusionCounts c;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (grid.region[i] != EvalRegion::kOccluded || gt[i] == kIgnore) continue;
    const bool g = gt[i] != kEmpty;
    const bool p = pred[i] != kEmpty && pred[i] != kIgnore;
    if (g && p) ++c.tp;
    if (!g && p) ++c.fp;
    if (g && !p) ++c.fn;
  }
  return c;
}

std::array<ConfusionCounts, 11> class_counts(const LabelVolume& pred,
                                             const LabelVolume& gt,
                                             const OccupancyGrid& grid,
                                             SemanticDomain domain) {
  std::array<ConfusionCounts, 11> counts{};
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!in_semantic_domain(grid.region[i], domain) || gt[i] == kIgnore) continue;
    const int g = gt[i];
    const int p = pred[i] == kIgnore ? kEmpty : pred[i];
    if (g == p) {
      if (g != kEmpty) ++counts[g - 1].tp;
      continue;
    }
    if (p != kEmpty && p < kClassCount) ++counts[p - 1].fp;
    if (g != kEmpty) ++counts[g - 1].fn;
  }
  return counts;
}

std::string format_ratio(const Ratio& r, bool percent) {
  if (!r) return "undefined";
  char buf[32];
  if (percent) {
    std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * *r);
  } else {
    std::snprintf(buf, sizeof(buf), "%.6f", *r);
  }
  return buf;
}

}  // namespace

Ratio ConfusionCounts::precision() const { return ratio(tp, tp + fp); }
Ratio ConfusionCounts::recall() const { return ratio(tp, tp + fn); }
Ratio ConfusionCounts::iou() const { return ratio(tp, tp + fp + fn); }

SceneCompletion scene_completion(const LabelVolume& pred, const LabelVolume& gt,
                                 const OccupancyGrid& grid) {
  check_inputs(pred, gt, grid);
  SceneCompletion sc;
  sc.counts = sc_counts(pred, gt, grid);
  sc.precision = sc.counts.precision();
  sc.recall = sc.counts.recall();
  sc.iou = sc.counts.iou();
  return sc;
}

SemanticIou semantic_iou(const LabelVolume& pred, const LabelVolume& gt,
                         const OccupancyGrid& grid, SemanticDomain domain) {
  check_inputs(pred, gt, grid);
  return finalize_report({}, class_counts(pred, gt, grid, domain), 1).ssc;
}

EvalReport finalize_report(const ConfusionCounts& sc,
                           const std::array<ConfusionCounts, 11>& classes,
                           std::size_t samples) {
  EvalReport r;
  r.samples = samples;
  r.sc.counts = sc;
  r.sc.precision = sc.precision();
  r.sc.recall = sc.recall();
  r.sc.iou = sc.iou();
  r.ssc.counts = classes;
  double sum = 0.0;
  int defined = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    r.ssc.per_class[c] = classes[c].iou();
    if (r.ssc.per_class[c]) {
      sum += *r.ssc.per_class[c];
      ++defined;
    }
  }
  if (defined > 0) r.ssc.average = sum / defined;
  return r;
}

void EvalAccumulator::add(const LabelVolume& pred, const LabelVolume& gt,
                          const OccupancyGrid& grid) {
  check_inputs(pred, gt, grid);
  sc_ += sc_counts(pred, gt, grid);
  const auto cls = class_counts(pred, gt, grid, domain_);
  for (std::size_t c = 0; c < cls.size(); ++c) classes_[c] += cls[c];
  ++samples_;
}

EvalReport EvalAccumulator::report() const {
  return finalize_report(sc_, classes_, samples_);
}

std::string format_report_table(const EvalReport& report) {
  std::ostringstream os;
  os << "scene completion (occluded voxels)\n";
  os << "  prec.  rec.   IoU\n  " << format_ratio(report.sc.precision, true) << "  "
     << format_ratio(report.sc.recall, true) << "  "
     << format_ratio(report.sc.iou, true) << "\n";
  os << "semantic scene completion (IoU, %)\n ";
  for (auto name : kClassColumns) os << " " << name;
  os << " avg.\n ";
  for (const auto& r : report.ssc.per_class) os << " " << format_ratio(r, true);
  os << " " << format_ratio(report.ssc.average, true) << "\n";
  os << "samples: " << report.samples << "\n";
  return os.str();
}

std::string format_report_kv(const EvalReport& report) {
  std::ostringstream os;
  os << "samples=" << report.samples << "\n";
  os << "prec.=" << format_ratio(report.sc.precision, false) << "\n";
  os << "rec.=" << format_ratio(report.sc.recall, false) << "\n";
  os << "IoU=" << format_ratio(report.sc.iou, false) << "\n";
  for (std::size_t c = 0; c < kClassColumns.size(); ++c) {
    os << kClassColumns[c] << "=" << format_ratio(report.ssc.per_class[c], false)
       << "\n";
  }
  os << "avg.=" << format_ratio(report.ssc.average, false) << "\n";
  return os.str();
}

}  // namespace voxelforge
