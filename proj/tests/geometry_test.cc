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

#include "voxelforge/geometry.hpp"

#include <random>

#include <Eigen/Geometry>

#include "gtest/gtest.h"
#include "voxelforge/errors.hpp"

namespace voxelforge {
namespace {

CameraIntrinsics test_camera() { return {100.0, 110.0, 31.5, 23.5, 64, 48}; }

TEST(VoxelGridSpecTest, CanonicalAndDeskGrids) {
  const VoxelGridSpec c = VoxelGridSpec::canonical();
  EXPECT_EQ(c.dims, (std::array<int, 3>{240, 144, 240}));
  EXPECT_DOUBLE_EQ(c.voxel_size, 0.02);
  EXPECT_EQ(c.voxels_in(0.24), 12);
  const VoxelGridSpec d = VoxelGridSpec::desk();
  EXPECT_EQ(d.dims, (std::array<int, 3>{60, 36, 60}));
  EXPECT_EQ(d.voxels_in(0.24), 3);
  EXPECT_TRUE(c.extent().isApprox(d.extent()));
}

TEST(VoxelGridSpecTest, RejectsNonIntegralExtent) {
  EXPECT_THROW(VoxelGridSpec::from_extent(Eigen::Vector3d::Zero(),
                                          Eigen::Vector3d(1.0, 1.0, 1.01), 0.02),
               std::invalid_argument);
  EXPECT_THROW(VoxelGridSpec::from_extent(Eigen::Vector3d::Zero(),
                                          Eigen::Vector3d::Ones(), 0.0),
               std::invalid_argument);
}

TEST(VoxelGridSpecTest, LinearIndexRoundTrip) {
  const VoxelGridSpec spec = VoxelGridSpec::from_extent(
      Eigen::Vector3d::Zero(), Eigen::Vector3d(0.5, 0.3, 0.7), 0.1);
  for (std::size_t i = 0; i < spec.voxel_count(); ++i) {
    EXPECT_EQ(spec.linear_index(spec.unravel(i)), i);
  }
  EXPECT_EQ(spec.linear_index({1, 0, 0}), 1u);
  EXPECT_EQ(spec.linear_index({0, 1, 0}), 5u);
  EXPECT_EQ(spec.linear_index({0, 0, 1}), 15u);
}

TEST(VoxelGridSpecTest, DownsampledKeepsExtent) {
  const VoxelGridSpec d = VoxelGridSpec::desk().downsampled(4);
  EXPECT_EQ(d.dims, (std::array<int, 3>{15, 9, 15}));
  EXPECT_DOUBLE_EQ(d.voxel_size, 0.32);
  EXPECT_THROW(VoxelGridSpec::desk().downsampled(7), std::invalid_argument);
}

TEST(WorldToVoxelTest, BoundariesGoToHigherCell) {
  const VoxelGridSpec spec = VoxelGridSpec::from_extent(
      Eigen::Vector3d(-1.0, 0.0, 0.0), Eigen::Vector3d(2.0, 1.0, 1.0), 0.25);
  const auto v = world_to_voxel(Eigen::Vector3d(-0.5, 0.25, 0.0), spec);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(*v, (VoxelIndex{2, 1, 0}));
  EXPECT_FALSE(world_to_voxel(Eigen::Vector3d(1.0, 0.5, 0.5), spec).has_value());
  EXPECT_FALSE(world_to_voxel(Eigen::Vector3d(0.0, -1e-12, 0.5), spec).has_value());
  for (std::size_t i = 0; i < spec.voxel_count(); ++i) {
    const VoxelIndex idx = spec.unravel(i);
    EXPECT_EQ(world_to_voxel(spec.voxel_center(idx), spec), idx);
  }
}

TEST(RigidTransformTest, RejectsImproperRotation) {
  Eigen::Matrix3d reflect = Eigen::Matrix3d::Identity();
  reflect(0, 0) = -1.0;
  EXPECT_THROW(RigidTransform(reflect, Eigen::Vector3d::Zero()), std::invalid_argument);
  EXPECT_THROW(RigidTransform(2.0 * Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero()),
               std::invalid_argument);
}

TEST(RigidTransformTest, InverseAndComposition) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    const RigidTransform a(q.normalized().toRotationMatrix(),
                           Eigen::Vector3d(n(rng), n(rng), n(rng)));
    const Eigen::Vector3d p(n(rng), n(rng), n(rng));
    EXPECT_TRUE(a.inverse().apply(a.apply(p)).isApprox(p, 1e-12));
    EXPECT_TRUE((a * a.inverse()).apply(p).isApprox(p, 1e-12));
    EXPECT_TRUE((a * a).apply(p).isApprox(a.apply(a.apply(p)), 1e-12));
  }
}

TEST(PinholeTest, UnprojectFollowsPinholeModel) {
  const CameraIntrinsics k = test_camera();
  const Eigen::Vector3d p = unproject_pixel(10.0, 40.0, 2.5, k);
  EXPECT_DOUBLE_EQ(p.x(), (10.0 - 31.5) * 2.5 / 100.0);
  EXPECT_DOUBLE_EQ(p.y(), (40.0 - 23.5) * 2.5 / 110.0);
  EXPECT_DOUBLE_EQ(p.z(), 2.5);
  const Eigen::Vector2d uv = project_point(p, k);
  EXPECT_NEAR(uv.x(), 10.0, 1e-12);
  EXPECT_NEAR(uv.y(), 40.0, 1e-12);
  EXPECT_THROW(unproject_pixel(1.0, 1.0, 0.0, k), std::invalid_argument);
  EXPECT_THROW(unproject_pixel(64.0, 1.0, 1.0, k), std::invalid_argument);
}

TEST(PinholeTest, PointCloudSkipsMissingDepth) {
  const CameraIntrinsics k = test_camera();
  DepthMap depth(k.width, k.height, 1.5);
  depth(3, 4) = 0.0;
  depth(5, 6) = 0.0;
  const RigidTransform pose(Eigen::Matrix3d::Identity(), Eigen::Vector3d(1.0, 2.0, 3.0));
  const PointCloud cloud = depth_to_point_cloud(depth, k, pose);
  EXPECT_EQ(cloud.size(), depth.size() - 2);
  for (const auto& p : cloud.points) EXPECT_NEAR(p.z(), 4.5, 1e-12);
}

TEST(VoxelizeTest, CountsDroppedPoints) {
  const VoxelGridSpec spec = VoxelGridSpec::from_extent(
      Eigen::Vector3d::Zero(), Eigen::Vector3d(1.0, 1.0, 1.0), 0.25);
  PointCloud cloud;
  cloud.points = {{0.1, 0.1, 0.1}, {0.12, 0.2, 0.05}, {0.9, 0.5, 0.3}, {1.5, 0.5, 0.5},
                  {-0.1, 0.5, 0.5}};
  const VoxelizeResult r = voxelize(cloud, spec);
  EXPECT_EQ(r.dropped, 2u);
  EXPECT_EQ(r.occupancy(0, 0, 0), 1);
  EXPECT_EQ(r.occupancy(3, 2, 1), 1);
  std::size_t total = 0;
  for (auto v : r.occupancy.values()) total += v;
  EXPECT_EQ(total, 2u);
}

}  // namespace
}  // namespace voxelforge
