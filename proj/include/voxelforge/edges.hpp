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

#ifndef VOXELFORGE_EDGES_HPP_
#define VOXELFORGE_EDGES_HPP_

#include <cstddef>

#include "voxelforge/geometry.hpp"
#include "voxelforge/raster.hpp"

namespace voxelforge {

/// Canny runs on grayscale luma. Thresholds are expressed in intensity
/// units: the gradient magnitude is the raw 3x3 Sobel response divided by 4,
/// so an unblurred unit step scores 1.
struct CannyParams {
  double sigma = 1.4;
  double t_low = 0.1;
  double t_high = 0.2;

  void validate() const;
};

/// luma = 0.299 R + 0.587 G + 0.114 B.
GrayImage rgb_to_gray(const RgbImage& rgb);

/// Separable Gaussian with radius ceil(3 sigma), normalized weights and
/// edge-replicated borders.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

struct GradientField {
  GrayImage magnitude;    // sqrt(gx^2 + gy^2), raw Sobel scale
  GrayImage orientation;  // atan2(gy, gx) in radians, gy along +v (down)
};

/// Standard 3x3 Sobel kernels with edge-replicated borders. Requires an
/// image of at least 3 x 3.
GradientField sobel_gradients(const GrayImage& img);

/// Non-maximum suppression over 4 quantized directions. `magnitude` is in
/// threshold units. Border pixels are always suppressed. Ties between equal
/// neighbors keep the pixel on the lower-index side so a symmetric ridge
/// stays one pixel wide.
GrayImage non_max_suppression(const GrayImage& magnitude,
                              const GrayImage& orientation);

/// Hysteresis: pixels >= t_high seed edges; pixels >= t_low are kept when
/// 8-connected to a seed.
EdgeMask hysteresis(const GrayImage& suppressed, double t_low, double t_high);

EdgeMask canny(const GrayImage& gray, const CannyParams& params);
EdgeMask canny(const RgbImage& rgb, const CannyParams& params);

struct EdgeProjection {
  PointCloud cloud;
  std::size_t missing_depth = 0;  // edge pixels skipped for lack of depth
};

/// Unprojects every edge pixel that has a depth reading, using that same
/// pixel's depth.
EdgeProjection edges_to_point_cloud(const EdgeMask& mask, const DepthMap& depth,
                                    const CameraIntrinsics& k,
                                    const RigidTransform& camera_to_world);

}  // namespace voxelforge

#endif  // VOXELFORGE_EDGES_HPP_
