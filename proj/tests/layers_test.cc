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

#include "voxelforge/layers.hpp"

#include <cmath>
#include <random>

#include "grad_check.hpp"
#include "gtest/gtest.h"

namespace voxelforge {
namespace {

using testing::dot;
using testing::naive_conv3d;
using testing::random_conv;
using testing::random_tensor;

TEST(Conv3dTest, MatchesNaiveLoops) {
  std::mt19937_64 rng(1);
  struct Geometry {
    int k, stride, dilation, padding;
  };
  for (const Geometry g : {Geometry{3, 1, 1, 1}, Geometry{3, 2, 1, 1}, Geometry{3, 1, 2, 2},
                           Geometry{3, 2, 2, 2}, Geometry{1, 1, 1, 0}, Geometry{3, 1, 1, 0},
                           Geometry{2, 2, 1, 0}}) {
    const Tensor5<double> x = random_tensor({2, 3, 7, 6, 5}, rng);
    const auto p = random_conv(3, 4, g.k, g.stride, g.dilation, g.padding, rng);
    const Tensor5<double> got = conv3d_forward(x, p);
    const Tensor5<double> want = naive_conv3d(x, p);
    ASSERT_EQ(got.shape(), want.shape());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(Conv3dTest, OutputDims) {
  const auto p = Conv3Params<float>::zeros(1, 1, 3, 2, 1, 1);
  EXPECT_EQ(p.output_dims({60, 36, 60}), (std::array<int, 3>{30, 18, 30}));
  const auto d = Conv3Params<float>::zeros(1, 1, 3, 1, 2, 2);
  EXPECT_EQ(d.output_dims({15, 9, 15}), (std::array<int, 3>{15, 9, 15}));
}

TEST(Conv3dTest, FloatAgreesWithDouble) {
  std::mt19937_64 rng(2);
  const Tensor5<double> x = random_tensor({1, 2, 6, 6, 6}, rng);
  const auto p = random_conv(2, 3, 3, 2, 1, 1, rng);
  Conv3Params<float> pf = Conv3Params<float>::zeros(2, 3, 3, 2, 1, 1);
  for (std::size_t i = 0; i < p.weights.size(); ++i) pf.weights[i] = static_cast<float>(p.weights[i]);
  for (int i = 0; i < 3; ++i) pf.bias[i] = static_cast<float>(p.bias[i]);
  const Tensor5<float> yf = conv3d_forward(tensor_cast<float>(x), pf);
  const Tensor5<double> yd = conv3d_forward(x, p);
  for (std::size_t i = 0; i < yd.size(); ++i) EXPECT_NEAR(yf[i], yd[i], 1e-4);
}

TEST(Conv3dTest, RejectsBadInputs) {
  const auto p = Conv3Params<double>::zeros(2, 3, 3);
  EXPECT_THROW(conv3d_forward(Tensor5<double>({1, 3, 4, 4, 4}), p), std::invalid_argument);
  EXPECT_THROW(conv3d_forward(Tensor5<double>({1, 2, 2, 4, 4}), p), std::invalid_argument);
  auto bad = p;
  bad.bias.pop_back();
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Conv3dTest, HeNormalScale) {
  std::mt19937_64 rng(3);
  const auto p = Conv3Params<double>::he_normal(16, 32, 3, rng);
  double sq = 0.0;
  for (double w : p.weights.values()) sq += w * w;
  const double var = sq / static_cast<double>(p.weights.size());
  EXPECT_NEAR(var, 2.0 / (16 * 27), 0.1 * 2.0 / (16 * 27));
  for (double b : p.bias) EXPECT_EQ(b, 0.0);
}

TEST(GradientTest, RandomizedSuite) {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const auto r = testing::run_gradient_suite(seed);
    EXPECT_LT(r.conv, 1e-6) << "seed " << seed;
    EXPECT_LT(r.resblock, 1e-6) << "seed " << seed;
    EXPECT_LT(r.softmax_cce, 1e-6) << "seed " << seed;
  }
}

TEST(GradientTest, ConvSkipsInputGradientOnRequest) {
  std::mt19937_64 rng(4);
  const Tensor5<double> x = random_tensor({1, 2, 5, 5, 5}, rng);
  const auto p = random_conv(2, 2, 3, 1, 1, 1, rng);
  const auto g = conv3d_backward(x, p, random_tensor({1, 2, 5, 5, 5}, rng), false);
  EXPECT_EQ(g.grad_x.size(), 0u);
  EXPECT_EQ(g.grad_w.size(), p.weights.size());
}

TEST(ReluTest, ForwardAndBackward) {
  Tensor5<double> x({1, 1, 1, 1, 4});
  x[0] = -1.0;
  x[1] = 0.0;
  x[2] = 2.0;
  x[3] = -0.5;
  const auto y = relu_forward(x);
  EXPECT_EQ(y[0], 0.0);
  EXPECT_EQ(y[2], 2.0);
  const auto g = relu_backward(x, Tensor5<double>(x.shape(), 3.0));
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 0.0);
  EXPECT_EQ(g[2], 3.0);
}

TEST(UpsampleTest, NearestAndAdjoint) {
  std::mt19937_64 rng(5);
  const Tensor5<double> x = random_tensor({2, 3, 2, 3, 4}, rng);
  const std::array<int, 3> dims{4, 5, 8};
  const Tensor5<double> up = upsample_nearest(x, dims);
  ASSERT_EQ(up.shape(), (std::array<int, 5>{2, 3, 4, 5, 8}));
  EXPECT_EQ(up(1, 2, 3, 4, 7), x(1, 2, 1, 2, 3));
  EXPECT_EQ(up(0, 1, 2, 3, 1), x(0, 1, 1, 1, 0));
  // <up(x), g> == <x, up^T(g)>
  const Tensor5<double> g = random_tensor(up.shape(), rng);
  EXPECT_NEAR(dot(up, g), dot(x, upsample_nearest_backward(g, x.shape())), 1e-12);
  EXPECT_THROW(upsample_nearest(x, {5, 5, 8}), std::invalid_argument);
}

TEST(ChannelsTest, ConcatSplitRoundTrip) {
  std::mt19937_64 rng(6);
  const Tensor5<double> a = random_tensor({2, 2, 3, 3, 3}, rng);
  const Tensor5<double> b = random_tensor({2, 3, 3, 3, 3}, rng);
  const Tensor5<double> c = concat_channels(a, b);
  EXPECT_EQ(c.c(), 5);
  EXPECT_EQ(c(1, 3, 2, 1, 0), b(1, 1, 2, 1, 0));
  const auto [a2, b2] = split_channels(c, 2);
  EXPECT_EQ(a2, a);
  EXPECT_EQ(b2, b);
  EXPECT_THROW(concat_channels(a, random_tensor({2, 1, 3, 3, 4}, rng)), std::invalid_argument);
}

TEST(SoftmaxTest, DistributionAndStability) {
  Tensor5<double> z({1, 3, 1, 1, 2});
  z(0, 0, 0, 0, 0) = 1000.0;
  z(0, 1, 0, 0, 0) = 1000.0;
  z(0, 2, 0, 0, 0) = -1000.0;
  z(0, 0, 0, 0, 1) = 1.0;
  z(0, 1, 0, 0, 1) = 2.0;
  z(0, 2, 0, 0, 1) = 3.0;
  const auto p = softmax_channels(z);
  EXPECT_NEAR(p(0, 0, 0, 0, 0), 0.5, 1e-15);
  EXPECT_EQ(p(0, 2, 0, 0, 0), 0.0);
  const double e = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  EXPECT_NEAR(p(0, 2, 0, 0, 1), std::exp(3.0) / e, 1e-15);
}

TEST(WeightedCceTest, HandValues) {
  Tensor5<double> p({1, 2, 1, 1, 3});
  p(0, 0, 0, 0, 0) = 0.25;
  p(0, 1, 0, 0, 0) = 0.75;
  p(0, 0, 0, 0, 1) = 0.5;
  p(0, 1, 0, 0, 1) = 0.5;
  p(0, 0, 0, 0, 2) = 1.0;
  p(0, 1, 0, 0, 2) = 0.0;
  Tensor5<std::uint8_t> labels({1, 1, 1, 1, 3});
  labels[0] = 1;
  labels[1] = 0;
  labels[2] = 1;  // p = 0 for the true class, but the weight is zero
  Tensor5<double> w({1, 1, 1, 1, 3});
  w[0] = 2.0;
  w[1] = 1.0;
  w[2] = 0.0;
  const auto r = weighted_cce(p, one_hot<double>(labels, 2), w);
  EXPECT_NEAR(r.loss, -2.0 * std::log(0.75) - std::log(0.5), 1e-15);
  EXPECT_DOUBLE_EQ(r.weight_sum, 3.0);
  EXPECT_DOUBLE_EQ(r.grad_logits(0, 0, 0, 0, 0), 0.5);
  EXPECT_DOUBLE_EQ(r.grad_logits(0, 1, 0, 0, 0), -0.5);
  EXPECT_DOUBLE_EQ(r.grad_logits(0, 0, 0, 0, 2), 0.0);
  EXPECT_TRUE(std::isfinite(r.loss));
}

TEST(WeightedCceTest, RejectsNonDistributions) {
  Tensor5<double> p({1, 2, 1, 1, 1}, 0.6);
  const Tensor5<double> y({1, 2, 1, 1, 1});
  const Tensor5<double> w({1, 1, 1, 1, 1}, 1.0);
  EXPECT_THROW(weighted_cce(p, y, w), std::invalid_argument);
  p[0] = -0.1;
  p[1] = 1.1;
  EXPECT_THROW(weighted_cce(p, y, w), std::invalid_argument);
  EXPECT_THROW(weighted_cce(Tensor5<double>({1, 2, 1, 1, 1}, 0.5), y, Tensor5<double>({1, 2, 1, 1, 1})),
               std::invalid_argument);
}

TEST(OneHotTest, IgnoreMapsToZeros) {
  Tensor5<std::uint8_t> labels({1, 1, 1, 1, 3});
  labels[0] = 2;
  labels[1] = 255;
  labels[2] = 0;
  const auto y = one_hot<float>(labels, 3);
  EXPECT_EQ(y(0, 2, 0, 0, 0), 1.0f);
  EXPECT_EQ(y(0, 0, 0, 0, 1) + y(0, 1, 0, 0, 1) + y(0, 2, 0, 0, 1), 0.0f);
  EXPECT_EQ(y(0, 0, 0, 0, 2), 1.0f);
  labels[0] = 3;
  EXPECT_THROW(one_hot<float>(labels, 3), std::invalid_argument);
}

TEST(ResBlockTest, IdentityWhenConvolutionsAreZero) {
  std::mt19937_64 rng(7);
  ResBlockParams<double> p{Conv3Params<double>::zeros(3, 3, 3, 1, 2, 2),
                           Conv3Params<double>::zeros(3, 3, 3, 1, 2, 2)};
  const Tensor5<double> x = random_tensor({1, 3, 4, 4, 4}, rng);
  const Tensor5<double> y = resnet_block_forward(x, p);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(y[i], std::max(0.0, x[i]));
}

}  // namespace
}  // namespace voxelforge
