// Copyright 2026 The LidarFuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lidarfuse/depth_render.h"
#include "lidarfuse/errors.h"
#include "lidarfuse/scene_io.h"
#include "oracles.h"
#include "test_util.h"

namespace lidarfuse {
namespace {

using testing::IdentityCamera;

Surfel FacingSurfel(double radius) {
  Surfel s;
  s.normal = Eigen::Vector3d::UnitZ();
  s.tangent = Eigen::Vector3d::UnitX();
  s.radius_tangent = s.radius_bitangent = radius;
  return s;
}

std::vector<std::uint32_t> AllIndices(std::size_t n) {
  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
  return idx;
}

TEST(RasterizeTest, FacingDiskOnPrincipalRay) {
  DepthImage depth(100, 100);
  RasterizeSurfel(&depth, IdentityCamera(), {0, 0, 5}, FacingSurfel(1.0), 1.0);
  EXPECT_EQ(depth.At(50, 50), 5.0);
  EXPECT_TRUE(std::isinf(depth.At(0, 0)));
}

TEST(RasterizeTest, ZBufferKeepsNearest) {
  DepthImage depth(100, 100);
  RasterizeSurfel(&depth, IdentityCamera(), {0, 0, 5}, FacingSurfel(1.0), 1.0);
  RasterizeSurfel(&depth, IdentityCamera(), {0, 0, 3}, FacingSurfel(1.0), 1.0);
  RasterizeSurfel(&depth, IdentityCamera(), {0, 0, 4}, FacingSurfel(1.0), 1.0);
  EXPECT_EQ(depth.At(50, 50), 3.0);
}

TEST(RasterizeTest, DilationScalesCoverage) {
  // Radius 0.1 at Z = 5 covers |u - 50| <= 2 px; k = 8 covers 16 px.
  DepthImage k1(100, 100), k8(100, 100);
  RasterizeSurfel(&k1, IdentityCamera(), {0, 0, 5}, FacingSurfel(0.1), 1.0);
  RasterizeSurfel(&k8, IdentityCamera(), {0, 0, 5}, FacingSurfel(0.1), 8.0);
  EXPECT_TRUE(std::isinf(k1.At(50, 54)));
  EXPECT_EQ(k8.At(50, 54), 5.0);
  EXPECT_EQ(k8.At(50, 65), 5.0);
  EXPECT_TRUE(std::isinf(k8.At(50, 67)));
  EXPECT_THROW(RasterizeSurfel(&k1, IdentityCamera(), {0, 0, 5},
                               FacingSurfel(0.1), 0.5),
               InvalidArgument);
}

TEST(RasterizeTest, EdgeOnDiskIsSkipped) {
  Surfel s = FacingSurfel(1.0);
  s.normal = Eigen::Vector3d::UnitX();
  s.tangent = Eigen::Vector3d::UnitY();
  DepthImage depth(100, 100);
  RasterizeSurfel(&depth, IdentityCamera(), {0, 0, 5}, s, 1.0);
  EXPECT_TRUE(std::all_of(depth.depth.begin(), depth.depth.end(),
                          [](double d) { return std::isinf(d); }));
}

TEST(RasterizeTest, OwnSurfelHasTinyRelativeError) {
  // Face-on surfels: the disk lies in a plane of constant camera Z.
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1, 1);
  int tested = 0;
  for (int i = 0; i < 200; ++i) {
    CameraFrame cam = IdentityCamera(500, 640, 480);
    cam.camera_from_world = oracle::LookAt({u(rng), u(rng), u(rng)},
                                           {u(rng), u(rng), 20.0});
    LidarPoint p;
    p.position = {4 * u(rng), 4 * u(rng), 20 + 5 * u(rng)};
    const auto proj = oracle::ProjectPoint(cam, p.position);
    if (!proj.in_view) continue;
    Surfel s;
    s.normal = -cam.camera_from_world.rotation.row(2).transpose();
    s.tangent = cam.camera_from_world.rotation.row(0).transpose();
    s.radius_tangent = s.radius_bitangent = 0.05;
    for (double k : {1.0, 8.0}) {
      DepthImage depth(640, 480);
      RasterizeSurfel(&depth, cam, p.position, s, k);
      const double d = depth.At(static_cast<int>(proj.v),
                                static_cast<int>(proj.u));
      EXPECT_LE(std::abs(d - proj.z) / proj.z, 1e-6);
    }
    ++tested;
  }
  EXPECT_GT(tested, 100);
}

TEST(RenderDepthImageTest, MatchesRayDiskOracle) {
  std::mt19937_64 rng(15);
  for (int scene = 0; scene < 30; ++scene) {
    const oracle::DiskScene s = oracle::RandomDiskScene(rng);
    const std::vector<oracle::Disk> disks = s.Disks();
    for (double k : {1.0, 2.0, 8.0}) {
      const auto expected = oracle::RenderDepth(s.camera, disks, k);
      for (const kernels::KernelSet* ks : kernels::AvailableKernels()) {
        const DepthImage got =
            RenderDepthImage(s.camera, AllIndices(s.points.size()), s.points,
                             s.surfels, k, 20.0, *ks);
        ASSERT_EQ(got.depth.size(), expected.size());
        for (std::size_t px = 0; px < expected.size(); ++px) {
          if (std::isinf(expected[px])) {
            ASSERT_TRUE(std::isinf(got.depth[px])) << ks->name << " " << px;
          } else {
            ASSERT_NEAR(got.depth[px], expected[px], 1e-9)
                << ks->name << " " << px;
          }
        }
      }
    }
  }
}

TEST(RenderDepthImageTest, DilationIsMonotone) {
  std::mt19937_64 rng(16);
  for (int scene = 0; scene < 30; ++scene) {
    const oracle::DiskScene s = oracle::RandomDiskScene(rng);
    const auto idx = AllIndices(s.points.size());
    const DepthImage k2 =
        RenderDepthImage(s.camera, idx, s.points, s.surfels, 2.0, 20.0);
    const DepthImage k8 =
        RenderDepthImage(s.camera, idx, s.points, s.surfels, 8.0, 20.0);
    for (std::size_t px = 0; px < k2.depth.size(); ++px) {
      ASSERT_GE(k2.depth[px], k8.depth[px]);
    }
  }
}

TEST(RenderDepthImageTest, OrderIndependent) {
  std::mt19937_64 rng(17);
  const oracle::DiskScene s = oracle::RandomDiskScene(rng);
  auto idx = AllIndices(s.points.size());
  const DepthImage a =
      RenderDepthImage(s.camera, idx, s.points, s.surfels, 8.0, 20.0);
  std::shuffle(idx.begin(), idx.end(), rng);
  const DepthImage b =
      RenderDepthImage(s.camera, idx, s.points, s.surfels, 8.0, 20.0);
  EXPECT_EQ(a.depth, b.depth);
}

TEST(RenderDepthImageTest, TimeCutoffAndEmptyInput) {
  std::vector<LidarPoint> pts(1);
  pts[0].position = {0, 0, 5};
  pts[0].timestamp = 25.0;
  const std::vector<Surfel> surfels = {FacingSurfel(1.0)};
  const DepthImage skipped = RenderDepthImage(
      IdentityCamera(), AllIndices(1), pts, surfels, 1.0, 20.0);
  EXPECT_TRUE(std::isinf(skipped.At(50, 50)));
  pts[0].timestamp = 20.0;
  const DepthImage kept = RenderDepthImage(IdentityCamera(), AllIndices(1),
                                           pts, surfels, 1.0, 20.0);
  EXPECT_EQ(kept.At(50, 50), 5.0);
  const DepthImage empty =
      RenderDepthImage(IdentityCamera(), {}, pts, surfels, 1.0, 20.0);
  EXPECT_TRUE(std::all_of(empty.depth.begin(), empty.depth.end(),
                          [](double d) { return std::isinf(d); }));
}

TEST(RenderDepthImageTest, DebugPgmQuantizesToMillimeters) {
  testing::TempDir dir("depth_pgm");
  DepthImage depth(2, 1);
  depth.Row(0)[0] = 1.2344;
  WriteDepthDebugPgm(depth, dir / "d.pgm");
  const Pgm16 pgm = ReadPgm16(dir / "d.pgm");
  EXPECT_EQ(pgm.samples[0], 1234);
  EXPECT_EQ(pgm.samples[1], 65535);
}

}  // namespace
}  // namespace lidarfuse
