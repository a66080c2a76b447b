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

#include <cmath>
#include <random>

#include <opencv2/imgproc.hpp>

#include "gtest/gtest.h"
#include "voxelforge/errors.hpp"

namespace voxelforge {
namespace {

GrayImage random_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GrayImage img(w, h);
  for (double& v : img.values()) v = u(rng);
  return img;
}

// Piecewise constant image of random rectangles on 8-bit levels.
GrayImage rectangles_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GrayImage img(w, h, 128.0 / 255.0);
  for (int r = 0; r < 6; ++r) {
    const int u0 = std::uniform_int_distribution<int>(2, w - 12)(rng);
    const int v0 = std::uniform_int_distribution<int>(2, h - 12)(rng);
    const int u1 = std::uniform_int_distribution<int>(u0 + 6, w - 3)(rng);
    const int v1 = std::uniform_int_distribution<int>(v0 + 6, h - 3)(rng);
    const double level = std::uniform_int_distribution<int>(0, 255)(rng) / 255.0;
    for (int v = v0; v < v1; ++v) {
      for (int u = u0; u < u1; ++u) img(u, v) = level;
    }
  }
  return img;
}

int clamp(int i, int n) { return std::min(std::max(i, 0), n - 1); }

TEST(GrayTest, UsesRec601Luma) {
  RgbImage rgb(2, 1);
  rgb(0, 0) = {1.0, 0.0, 0.0};
  rgb(1, 0) = {0.2, 0.4, 0.6};
  const GrayImage g = rgb_to_gray(rgb);
  EXPECT_DOUBLE_EQ(g(0, 0), 0.299);
  EXPECT_DOUBLE_EQ(g(1, 0), 0.299 * 0.2 + 0.587 * 0.4 + 0.114 * 0.6);
}

TEST(GaussianBlurTest, MatchesDirectTwoDimensionalSum) {
  const GrayImage img = random_image(23, 17, 1);
  for (double sigma : {0.6, 1.4, 2.0}) {
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    double norm = 0.0;
    for (int i = -r; i <= r; ++i) norm += std::exp(-(i * i) / (2.0 * sigma * sigma));
    const GrayImage out = gaussian_blur(img, sigma);
    for (int v = 0; v < img.height(); ++v) {
      for (int u = 0; u < img.width(); ++u) {
        double acc = 0.0;
        for (int j = -r; j <= r; ++j) {
          for (int i = -r; i <= r; ++i) {
            acc += std::exp(-(i * i + j * j) / (2.0 * sigma * sigma)) *
                   img(clamp(u + i, img.width()), clamp(v + j, img.height()));
          }
        }
        EXPECT_NEAR(out(u, v), acc / (norm * norm), 1e-12);
      }
    }
  }
}

TEST(GaussianBlurTest, PreservesConstantImage) {
  const GrayImage img(9, 7, 0.375);
  const GrayImage out = gaussian_blur(img, 1.4);
  for (double v : out.values()) EXPECT_NEAR(v, 0.375, 1e-14);
  EXPECT_THROW(gaussian_blur(img, 0.0), std::invalid_argument);
}

TEST(SobelTest, MatchesExplicitKernels) {
  const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  const GrayImage img = random_image(11, 9, 2);
  const GradientField g = sobel_gradients(img);
  for (int v = 0; v < img.height(); ++v) {
    for (int u = 0; u < img.width(); ++u) {
      double gx = 0.0;
      double gy = 0.0;
      for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) {
          const double p = img(clamp(u + i - 1, img.width()), clamp(v + j - 1, img.height()));
          gx += kx[j][i] * p;
          gy += ky[j][i] * p;
        }
      }
      EXPECT_NEAR(g.magnitude(u, v), std::hypot(gx, gy), 1e-12);
      if (std::hypot(gx, gy) > 1e-9) {
        EXPECT_NEAR(g.orientation(u, v), std::atan2(gy, gx), 1e-12);
      }
    }
  }
}

TEST(SobelTest, UnitStepScoresFourRaw) {
  GrayImage img(8, 8, 0.0);
  for (int v = 0; v < 8; ++v) {
    for (int u = 4; u < 8; ++u) img(u, v) = 1.0;
  }
  const GradientField g = sobel_gradients(img);
  EXPECT_DOUBLE_EQ(g.magnitude(3, 4), 4.0);
  EXPECT_DOUBLE_EQ(g.magnitude(4, 4), 4.0);
  EXPECT_DOUBLE_EQ(g.magnitude(1, 4), 0.0);
  EXPECT_THROW(sobel_gradients(GrayImage(2, 5)), std::invalid_argument);
}

TEST(NonMaxSuppressionTest, SymmetricRidgeStaysOnePixelWide) {
  GrayImage img(10, 10, 0.0);
  for (int v = 0; v < 10; ++v) {
    for (int u = 5; u < 10; ++u) img(u, v) = 1.0;
  }
  GradientField g = sobel_gradients(img);
  const GrayImage s = non_max_suppression(g.magnitude, g.orientation);
  for (int v = 1; v < 9; ++v) {
    int count = 0;
    for (int u = 0; u < 10; ++u) count += s(u, v) > 0.0;
    EXPECT_EQ(count, 1) << "row " << v;
    EXPECT_GT(s(4, v), 0.0);
  }
  for (int u = 0; u < 10; ++u) {
    EXPECT_EQ(s(u, 0), 0.0);
    EXPECT_EQ(s(u, 9), 0.0);
  }
}

TEST(HysteresisTest, KeepsWeakPixelsOnlyWhenConnected) {
  GrayImage s(8, 3, 0.0);
  s(1, 1) = 0.5;   // strong seed
  s(2, 1) = 0.15;  // weak, connected
  s(3, 2) = 0.15;  // weak, diagonal neighbor of the previous one
  s(6, 1) = 0.15;  // weak, isolated
  const EdgeMask m = hysteresis(s, 0.1, 0.2);
  EXPECT_EQ(m(1, 1), 1);
  EXPECT_EQ(m(2, 1), 1);
  EXPECT_EQ(m(3, 2), 1);
  EXPECT_EQ(m(6, 1), 0);
}

TEST(CannyTest, AgreesWithOpenCvOnRectangles) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GrayImage img = rectangles_image(96, 72, seed);
    const GradientField g = sobel_gradients(img);
    GrayImage scaled = g.magnitude;
    for (double& m : scaled.values()) m *= 0.25;
    const double t_low = 0.101;
    const double t_high = 0.203;
    const EdgeMask ours = hysteresis(non_max_suppression(scaled, g.orientation), t_low, t_high);

    cv::Mat u8(img.height(), img.width(), CV_8UC1);
    for (int v = 0; v < img.height(); ++v) {
      for (int u = 0; u < img.width(); ++u) {
        u8.at<std::uint8_t>(v, u) = static_cast<std::uint8_t>(std::lround(img(u, v) * 255.0));
      }
    }
    cv::Mat dx, dy, ref;
    cv::Sobel(u8, dx, CV_16S, 1, 0, 3, 1, 0, cv::BORDER_REPLICATE);
    cv::Sobel(u8, dy, CV_16S, 0, 1, 3, 1, 0, cv::BORDER_REPLICATE);
    // Raw 8-bit Sobel = 4 * 255 * our threshold units.
    cv::Canny(dx, dy, ref, t_low * 1020.0, t_high * 1020.0, true);

    int both = 0;
    int either = 0;
    for (int v = 2; v < img.height() - 2; ++v) {
      for (int u = 2; u < img.width() - 2; ++u) {
        const bool a = ours(u, v) != 0;
        const bool b = ref.at<std::uint8_t>(v, u) != 0;
        both += a && b;
        either += a || b;
      }
    }
    ASSERT_GT(either, 0);
    EXPECT_GE(static_cast<double>(both) / either, 0.99) << "seed " << seed;
  }
}

TEST(CannyTest, RejectsBadThresholds) {
  CannyParams p;
  p.t_low = 0.3;
  EXPECT_THROW(canny(GrayImage(8, 8), p), std::invalid_argument);
}

TEST(EdgeProjectionTest, UsesSamePixelDepth) {
  const CameraIntrinsics k{50.0, 50.0, 3.5, 2.5, 8, 6};
  EdgeMask mask(8, 6, 0);
  DepthMap depth(8, 6, 2.0);
  mask(1, 1) = 1;
  mask(4, 3) = 1;
  mask(6, 5) = 1;
  depth(4, 3) = 3.0;
  depth(6, 5) = 0.0;
  const RigidTransform pose(Eigen::Matrix3d::Identity(), Eigen::Vector3d(0.0, 0.0, 1.0));
  const EdgeProjection e = edges_to_point_cloud(mask, depth, k, pose);
  EXPECT_EQ(e.missing_depth, 1u);
  ASSERT_EQ(e.cloud.size(), 2u);
  EXPECT_TRUE(e.cloud.points[0].isApprox(Eigen::Vector3d(-2.5 * 2.0 / 50.0, -1.5 * 2.0 / 50.0, 3.0)));
  EXPECT_TRUE(e.cloud.points[1].isApprox(Eigen::Vector3d(0.5 * 3.0 / 50.0, 0.5 * 3.0 / 50.0, 4.0)));
  EXPECT_THROW(edges_to_point_cloud(EdgeMask(7, 6), depth, k, pose), DataError);
}

}  // namespace
}  // namespace voxelforge
