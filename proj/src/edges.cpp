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

#include "voxelforge/edges.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "voxelforge/errors.hpp"
#include "voxelforge/parallel.hpp"

namespace voxelforge {
namespace {

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& w : k) w /= sum;
  return k;
}

}  // namespace

void CannyParams::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("canny sigma must be positive");
  if (!(t_low > 0.0 && t_low < t_high)) {
    throw std::invalid_argument("canny thresholds must satisfy 0 < t_low < t_high");
  }
}

GrayImage rgb_to_gray(const RgbImage& rgb) {
  GrayImage gray(rgb.width(), rgb.height());
  for (int v = 0; v < rgb.height(); ++v) {
    for (int u = 0; u < rgb.width(); ++u) {
      const Rgb& c = rgb(u, v);
      gray(u, v) = 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2];
    }
  }
  return gray;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("blur sigma must be positive");
  const std::vector<double> k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int w = img.width();
  const int h = img.height();

  GrayImage horizontal(w, h);
  parallel_for(0, static_cast<std::size_t>(h), [&](std::size_t row) {
    const int v = static_cast<int>(row);
    for (int u = 0; u < w; ++u) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += k[i + radius] * img(clamp_index(u + i, w), v);
      }
      horizontal(u, v) = acc;
    }
  });

  GrayImage out(w, h);
  parallel_for(0, static_cast<std::size_t>(h), [&](std::size_t row) {
    const int v = static_cast<int>(row);
    for (int u = 0; u < w; ++u) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += k[i + radius] * horizontal(u, clamp_index(v + i, h));
      }
      out(u, v) = acc;
    }
  });
  return out;
}

GradientField sobel_gradients(const GrayImage& img) {
  const int w = img.width();
  const int h = img.height();
  if (w < 3 || h < 3) throw std::invalid_argument("sobel needs at least 3x3 pixels");
  GradientField g{GrayImage(w, h), GrayImage(w, h)};
  parallel_for(0, static_cast<std::size_t>(h), [&](std::size_t row) {
    const int v = static_cast<int>(row);
    const int vm = clamp_index(v - 1, h);
    const int vp = clamp_index(v + 1, h);
    for (int u = 0; u < w; ++u) {
      const int um = clamp_index(u - 1, w);
      const int up = clamp_index(u + 1, w);
      const double gx = (img(up, vm) + 2.0 * img(up, v) + img(up, vp)) -
                        (img(um, vm) + 2.0 * img(um, v) + img(um, vp));
      const double gy = (img(um, vp) + 2.0 * img(u, vp) + img(up, vp)) -
                        (img(um, vm) + 2.0 * img(u, vm) + img(up, vm));
      g.magnitude(u, v) = std::sqrt(gx * gx + gy * gy);
      g.orientation(u, v) = std::atan2(gy, gx);
    }
  });
  return g;
}

GrayImage non_max_suppression(const GrayImage& magnitude,
                              const GrayImage& orientation) {
  const int w = magnitude.width();
  const int h = magnitude.height();
  GrayImage out(w, h, 0.0);
  for (int v = 1; v + 1 < h; ++v) {
    for (int u = 1; u + 1 < w; ++u) {
      const double m = magnitude(u, v);
      if (m <= 0.0) continue;
      double deg = orientation(u, v) * 180.0 / std::numbers::pi;
      if (deg < 0.0) deg += 180.0;
      // (du, dv) of the neighbor that precedes (u, v) in row-major order.
      int du = -1;
      int dv = 0;
      if (deg >= 22.5 && deg < 67.5) {
        du = -1;
        dv = -1;
      } else if (deg >= 67.5 && deg < 112.5) {
        du = 0;
        dv = -1;
      } else if (deg >= 112.5 && deg < 157.5) {
        du = 1;
        dv = -1;
      }
      const double before = magnitude(u + du, v + dv);
      const double after = magnitude(u - du, v - dv);
      if (m > before && m >= after) out(u, v) = m;
    }
  }
  return out;
}

EdgeMask hysteresis(const GrayImage& suppressed, double t_low, double t_high) {
  const int w = suppressed.width();
  const int h = suppressed.height();
  EdgeMask mask(w, h, 0);
  std::vector<std::pair<int, int>> stack;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (suppressed(u, v) >= t_high && !mask(u, v)) {
        mask(u, v) = 1;
        stack.emplace_back(u, v);
      }
    }
  }
  while (!stack.empty()) {
    const auto [u, v] = stack.back();
    stack.pop_back();
    for (int dv = -1; dv <= 1; ++dv) {
      for (int du = -1; du <= 1; ++du) {
        const int nu = u + du;
        const int nv = v + dv;
        if (!mask.contains(nu, nv) || mask(nu, nv)) continue;
        if (suppressed(nu, nv) >= t_low) {
          mask(nu, nv) = 1;
          stack.emplace_back(nu, nv);
        }
      }
    }
  }
  return mask;
}

EdgeMask canny(const GrayImage& gray, const CannyParams& params) {
  params.validate();
  const GrayImage blurred = gaussian_blur(gray, params.sigma);
  GradientField g = sobel_gradients(blurred);
  for (double& m : g.magnitude.values()) m *= 0.25;
  return hysteresis(non_max_suppression(g.magnitude, g.orientation),
                    params.t_low, params.t_high);
}

EdgeMask canny(const RgbImage& rgb, const CannyParams& params) {
  return canny(rgb_to_gray(rgb), params);
}

EdgeProjection edges_to_point_cloud(const EdgeMask& mask, const DepthMap& depth,
                                    const CameraIntrinsics& k,
                                    const RigidTransform& camera_to_world) {
  k.validate();
  if (!mask.same_shape(depth) || depth.width() != k.width ||
      depth.height() != k.height) {
    throw DataError("edge mask, depth map and intrinsics disagree on size");
  }
  EdgeProjection out;
  for (int v = 0; v < mask.height(); ++v) {
    for (int u = 0; u < mask.width(); ++u) {
      if (!mask(u, v)) continue;
      const double d = depth(u, v);
      if (!(d > 0.0)) {
        ++out.missing_depth;
        continue;
      }
      out.cloud.points.push_back(camera_to_world.apply(unproject_pixel(u, v, d, k)));
    }
  }
  return out;
}

}  // namespace voxelforge
