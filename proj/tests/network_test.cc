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

#include "voxelforge/network.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <set>

#include "grad_check.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"
#include "voxelforge/checkpoint.hpp"
#include "voxelforge/errors.hpp"
#include "voxelforge/optim.hpp"

namespace voxelforge {
namespace {

NetworkConfig tiny_config(FusionScheme fusion, int base = 4) {
  NetworkConfig c;
  c.base_channels = base;
  c.fusion = fusion;
  c.input_dims = {8, 12, 8};
  c.seed = 5;
  return c;
}

template <typename T>
Tensor5<T> random_input(const NetworkConfig& c, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor5<T> x({n, 2, c.input_dims[0], c.input_dims[1], c.input_dims[2]});
  for (auto& v : x.values()) v = static_cast<T>(u(rng));
  return x;
}

constexpr FusionScheme kAllFusions[] = {FusionScheme::kEarly, FusionScheme::kMiddle,
                                        FusionScheme::kLate};

TEST(FusionTest, ParseAndName) {
  for (auto f : kAllFusions) EXPECT_EQ(parse_fusion(fusion_name(f)), f);
  EXPECT_THROW(parse_fusion("xf"), std::invalid_argument);
}

TEST(NetworkConfigTest, Validation) {
  NetworkConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.output_dims(), (std::array<int, 3>{15, 9, 15}));
  c.input_dims = {60, 34, 60};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = NetworkConfig();
  c.base_channels = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = NetworkConfig();
  c.bottleneck_dilations.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(EdgeNetTest, OutputShapeForEveryFusion) {
  for (auto f : kAllFusions) {
    EdgeNet<float> net(tiny_config(f));
    const Tensor5<float> y = net.forward(random_input<float>(net.config(), 2, 1));
    EXPECT_EQ(y.shape(), (std::array<int, 5>{2, 12, 2, 3, 2})) << fusion_name(f);
    for (float v : y.values()) EXPECT_TRUE(std::isfinite(v));
  }
}

TEST(EdgeNetTest, DeskOutputShape) {
  NetworkConfig c;
  c.base_channels = 2;
  EdgeNet<float> net(c);
  EXPECT_EQ(net.forward(random_input<float>(c, 1, 2)).shape(),
            (std::array<int, 5>{1, 12, 15, 9, 15}));
}

TEST(EdgeNetTest, ZeroInitHeadGivesUniformDistribution) {
  for (auto f : kAllFusions) {
    NetworkConfig c = tiny_config(f);
    c.zero_init_head = true;
    EdgeNet<float> net(c);
    const Tensor5<float> y = net.forward(random_input<float>(c, 1, 3));
    const Tensor5<float> p = softmax_channels(y);
    for (float v : p.values()) EXPECT_NEAR(v, 1.0f / 12.0f, 1e-7f);
  }
}

TEST(EdgeNetTest, ChannelParityAcrossFusions) {
  for (int base : {4, 5, 16}) {
    const auto ef = EdgeNet<float>(tiny_config(FusionScheme::kEarly, base)).level_channels();
    const auto mf = EdgeNet<float>(tiny_config(FusionScheme::kMiddle, base)).level_channels();
    const auto lf = EdgeNet<float>(tiny_config(FusionScheme::kLate, base)).level_channels();
    EXPECT_EQ(ef, mf) << "base " << base;
    EXPECT_EQ(ef, lf) << "base " << base;
    EXPECT_EQ(ef, (std::vector<int>{base, 2 * base}));
  }
  // Parameter counts differ by design (half-width branches); report them.
  for (auto f : kAllFusions) {
    const std::size_t n = EdgeNet<float>(tiny_config(f, 16)).parameter_count();
    ::testing::Test::RecordProperty("params_" + fusion_name(f), std::to_string(n));
    std::cout << fusion_name(f) << " parameters at base 16: " << n << "\n";
  }
}

TEST(EdgeNetTest, ParameterNamesUniqueAndCountConsistent) {
  for (auto f : kAllFusions) {
    EdgeNet<float> net(tiny_config(f));
    std::set<std::string> names;
    std::size_t total = 0;
    auto params = net.parameters();
    auto grads = net.gradients();
    ASSERT_EQ(params.size(), grads.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      EXPECT_TRUE(names.insert(params[i].name).second) << params[i].name;
      EXPECT_EQ(params[i].values.size(), grads[i].values.size());
      std::size_t prod = 1;
      for (int d : params[i].shape) prod *= static_cast<std::size_t>(d);
      EXPECT_EQ(prod, params[i].values.size());
      total += params[i].values.size();
    }
    EXPECT_EQ(total, net.parameter_count());
  }
}

TEST(EdgeNetTest, DeterministicForSeed) {
  EdgeNet<float> a(tiny_config(FusionScheme::kMiddle));
  EdgeNet<float> b(tiny_config(FusionScheme::kMiddle));
  const auto x = random_input<float>(a.config(), 1, 4);
  EXPECT_EQ(a.forward(x), b.forward(x));
  NetworkConfig other = tiny_config(FusionScheme::kMiddle);
  other.seed = 6;
  EdgeNet<float> c(other);
  EXPECT_NE(a.forward(x), c.forward(x));
}

TEST(EdgeNetTest, RejectsWrongInputShape) {
  EdgeNet<float> net(tiny_config(FusionScheme::kEarly));
  EXPECT_THROW(net.forward(Tensor5<float>({1, 3, 8, 12, 8})), std::invalid_argument);
  EXPECT_THROW(net.forward(Tensor5<float>({1, 2, 8, 8, 8})), std::invalid_argument);
}

// End-to-end gradient check through the whole network in double precision.
TEST(EdgeNetTest, BackwardMatchesFiniteDifferences) {
  for (auto f : kAllFusions) {
    NetworkConfig c = tiny_config(f, 2);
    c.input_dims = {8, 8, 8};
    EdgeNet<double> net(c);
    const Tensor5<double> x = random_input<double>(c, 1, 7);
    std::mt19937_64 rng(8);
    Tensor5<double> probe(net.forward(x).shape());
    testing::fill_normal(probe.values(), rng);
    net.forward(x);
    net.backward(probe);
    auto params = net.parameters();
    auto grads = net.gradients();
    auto loss = [&] { return testing::dot(net.forward(x), probe); };
    for (std::size_t i = 0; i < params.size(); i += 3) {
      // Check a prefix of each sampled tensor to bound runtime.
      const std::size_t n = std::min<std::size_t>(params[i].values.size(), 24);
      const double err = testing::relative_error(params[i].values.subspan(0, n),
                                                 std::span<const double>(grads[i].values).subspan(0, n),
                                                 loss);
      EXPECT_LT(err, 1e-6) << fusion_name(f) << " " << params[i].name;
    }
  }
}

TEST(CheckpointTest, RoundTrip) {
  testing::ScopedTempDir dir;
  NetworkConfig c = tiny_config(FusionScheme::kLate);
  c.bottleneck_dilations = {1, 2, 3};
  EdgeNet<float> net(c);
  std::mt19937_64 rng(9);
  for (auto& p : net.parameters()) {
    for (auto& v : p.values) v = static_cast<float>(rng() % 1000) / 7.0f;
  }
  save_checkpoint(dir / "net.enck", net);
  const NetworkConfig back = read_checkpoint_config(dir / "net.enck");
  EXPECT_EQ(back.bottleneck_dilations, c.bottleneck_dilations);
  EXPECT_EQ(back.fusion, FusionScheme::kLate);
  EXPECT_EQ(back.input_dims, c.input_dims);
  EdgeNet<float> loaded = load_checkpoint(dir / "net.enck");
  const auto x = random_input<float>(c, 1, 10);
  EXPECT_EQ(loaded.forward(x), net.forward(x));
}

TEST(CheckpointTest, RejectsMismatchAndCorruption) {
  testing::ScopedTempDir dir;
  EdgeNet<float> net(tiny_config(FusionScheme::kEarly));
  save_checkpoint(dir / "net.enck", net);
  EdgeNet<float> other(tiny_config(FusionScheme::kMiddle));
  EXPECT_THROW(load_checkpoint_into(dir / "net.enck", other), DataError);
  {
    std::ofstream os(dir / "bad.enck", std::ios::binary);
    os << "NOPE1234";
  }
  try {
    load_checkpoint(dir / "bad.enck");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatErrorKind::kBadMagic);
  }
  const auto size = std::filesystem::file_size(dir / "net.enck");
  std::filesystem::resize_file(dir / "net.enck", size - 10);
  try {
    load_checkpoint(dir / "net.enck");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatErrorKind::kTruncated);
  }
}

TEST(OptimTest, SgdMomentumMatchesHandRecurrence) {
  std::vector<double> theta{1.0, -2.0};
  std::vector<double> grad{0.5, 0.25};
  std::vector<ParamView<double>> params{{"p", {2}, theta}};
  std::vector<ParamView<double>> grads{{"p", {2}, grad}};
  OptimState<double> state;
  sgd_momentum_step(params, grads, state, 0.1);
  const double v0 = -0.1 * (0.5 + 0.0005 * 1.0);
  EXPECT_DOUBLE_EQ(theta[0], 1.0 + v0);
  sgd_momentum_step(params, grads, state, 0.1);
  const double v1 = 0.9 * v0 - 0.1 * (0.5 + 0.0005 * (1.0 + v0));
  EXPECT_DOUBLE_EQ(theta[0], 1.0 + v0 + v1);
  EXPECT_THROW(sgd_momentum_step(params, grads, state, 0.0), std::invalid_argument);
}

TEST(OptimTest, ConvergesOnQuadraticBowl) {
  // f(theta) = 0.5 sum a_i (theta_i - c_i)^2.
  const std::vector<double> a{1.0, 4.0, 0.5};
  const std::vector<double> c{3.0, -1.0, 2.0};
  std::vector<double> theta(3, 0.0);
  std::vector<double> grad(3);
  std::vector<ParamView<double>> params{{"t", {3}, theta}};
  std::vector<ParamView<double>> grads{{"t", {3}, grad}};
  OptimState<double> state;
  state.weight_decay = 0.0;
  for (int step = 0; step < 500; ++step) {
    for (int i = 0; i < 3; ++i) grad[i] = a[i] * (theta[i] - c[i]);
    sgd_momentum_step(params, grads, state, 0.05);
  }
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(theta[i], c[i], 1e-6);
}

TEST(OptimTest, OneCycleKnotsAndShape) {
  EXPECT_EQ(one_cycle_lr(0.0), 0.01);
  EXPECT_EQ(one_cycle_lr(10.0), 0.1);
  EXPECT_EQ(one_cycle_lr(20.0), 0.01);
  EXPECT_EQ(one_cycle_lr(30.0), 0.0005);
  EXPECT_EQ(one_cycle_lr(45.0), 0.0005);
  EXPECT_NEAR(one_cycle_lr(5.0), 0.055, 1e-15);
  EXPECT_NEAR(one_cycle_lr(25.0), 0.00525, 1e-15);
  for (double e = 0.0; e < 10.0; e += 0.5) EXPECT_LT(one_cycle_lr(e), one_cycle_lr(e + 0.5));
  for (double e = 10.0; e < 30.0; e += 0.5) EXPECT_GT(one_cycle_lr(e), one_cycle_lr(e + 0.5));
  EXPECT_THROW(one_cycle_lr(-1.0), std::invalid_argument);
  EXPECT_THROW(one_cycle_lr(std::nan("")), std::invalid_argument);
}

}  // namespace
}  // namespace voxelforge
