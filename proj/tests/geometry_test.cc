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

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "lidarfuse/errors.h"
#include "lidarfuse/spatial_index.h"
#include "lidarfuse/surfel_estimation.h"

namespace lidarfuse {
namespace {

std::vector<LidarPoint> RandomPoints(std::mt19937_64& rng, int n,
                                     double extent) {
  std::uniform_real_distribution<double> u(-extent, extent);
  std::vector<LidarPoint> points(n);
  for (auto& p : points) p.position = {u(rng), u(rng), u(rng)};
  return points;
}

std::vector<std::uint32_t> LinearRadius(const std::vector<LidarPoint>& pts,
                                        const Eigen::Vector3d& c, double r) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if ((pts[i].position - c).norm() <= r) out.push_back(i);
  }
  return out;
}

double AngleBetweenLines(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), std::abs(a.dot(b)));
}

TEST(SpatialIndexTest, SinglePoint) {
  std::vector<LidarPoint> pts(1);
  pts[0].position = {1, 2, 3};
  const SpatialIndex index = SpatialIndex::FromPoints(pts);
  EXPECT_EQ(index.RadiusQuery({1, 2, 3}, 0.0),
            std::vector<std::uint32_t>{0});
  EXPECT_TRUE(index.RadiusQuery({1, 2, 3.5}, 0.0).empty());
  EXPECT_EQ(index.Nearest({9, 9, 9}), 0u);
}

TEST(SpatialIndexTest, EmptyInputThrows) {
  std::vector<LidarPoint> none;
  EXPECT_THROW(SpatialIndex::FromPoints(none), InvalidArgument);
}

TEST(SpatialIndexTest, RadiusQueriesMatchLinearScan) {
  std::mt19937_64 rng(1);
  for (int n : {1000, 2000}) {
    const auto pts = RandomPoints(rng, n, 5.0);
    const SpatialIndex index = SpatialIndex::FromPoints(pts);
    std::uniform_real_distribution<double> u(-6, 6), r(0.0, 3.0);
    for (int q = 0; q < 50; ++q) {
      const Eigen::Vector3d c(u(rng), u(rng), u(rng));
      const double radius = r(rng);
      EXPECT_EQ(index.RadiusQuery(c, radius), LinearRadius(pts, c, radius));
    }
    // Query centered on points themselves, including duplicates.
    for (int q = 0; q < 20; ++q) {
      const Eigen::Vector3d c = pts[q * 7].position;
      EXPECT_EQ(index.RadiusQuery(c, 0.8), LinearRadius(pts, c, 0.8));
    }
  }
}

TEST(SpatialIndexTest, NearestMatchesLinearScanWithLowestIdTies) {
  std::mt19937_64 rng(2);
  auto pts = RandomPoints(rng, 500, 3.0);
  // Exact duplicates make distance ties.
  pts[400].position = pts[17].position;
  pts[401].position = pts[17].position;
  const SpatialIndex index = SpatialIndex::FromPoints(pts);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int q = 0; q < 200; ++q) {
    const Eigen::Vector3d c =
        q == 0 ? pts[17].position : Eigen::Vector3d(u(rng), u(rng), u(rng));
    std::uint32_t best = 0;
    for (std::uint32_t i = 1; i < pts.size(); ++i) {
      if ((pts[i].position - c).squaredNorm() <
          (pts[best].position - c).squaredNorm()) {
        best = i;
      }
    }
    EXPECT_EQ(index.Nearest(c), best);
  }
}

TEST(SpatialIndexTest, CustomIdsAreReturned) {
  const std::vector<Eigen::Vector3d> pos = {{0, 0, 0}, {1, 0, 0}, {5, 0, 0}};
  const std::vector<std::uint32_t> ids = {40, 10, 30};
  const SpatialIndex index(pos, ids);
  EXPECT_EQ(index.RadiusQuery({0.5, 0, 0}, 0.6),
            (std::vector<std::uint32_t>{10, 40}));
  EXPECT_EQ(index.Nearest({4, 0, 0}), 30u);
}

TEST(SurfelTest, PlaneNormalIsExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  std::vector<LidarPoint> pts(32);
  for (auto& p : pts) p.position = {u(rng), u(rng), 0.0};
  pts[0].position = Eigen::Vector3d::Zero();
  const SpatialIndex index = SpatialIndex::FromPoints(pts);
  const Surfel s = EstimateSurfel(0, pts, index, {});
  EXPECT_LT(AngleBetweenLines(s.normal, Eigen::Vector3d::UnitZ()), 1e-6);
  EXPECT_GE(s.normal.z(), 0.0);
  EXPECT_NEAR(s.radius_tangent, 0.25 * 0.25, 1e-15);
  EXPECT_LE(s.radius_bitangent, s.radius_tangent);
  EXPECT_TRUE(ValidateSurfel(s).empty());
}

TEST(SurfelTest, TiltedPlanesAllPoints) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Vector3d n =
        Eigen::Vector3d(u(rng), u(rng), u(rng)).normalized();
    const Eigen::Vector3d a = n.unitOrthogonal();
    const Eigen::Vector3d b = n.cross(a);
    std::vector<LidarPoint> pts(400);
    for (auto& p : pts) p.position = 3.0 * (u(rng) * a + u(rng) * b);
    const SpatialIndex index = SpatialIndex::FromPoints(pts);
    for (const Surfel& s : EstimateAllSurfels(pts, index, {})) {
      EXPECT_LT(AngleBetweenLines(s.normal, n), 1e-6);
    }
  }
}

TEST(SurfelTest, IsolatedPointFallsBackToUp) {
  std::vector<LidarPoint> pts(2);
  pts[1].position = {10, 0, 0};
  const SpatialIndex index = SpatialIndex::FromPoints(pts);
  const SurfelEstimate e = EstimateSurfelTraced(0, pts, index, {});
  EXPECT_TRUE(e.fallback);
  EXPECT_EQ(e.surfel.normal, Eigen::Vector3d::UnitZ());
  EXPECT_EQ(e.radii_tried,
            (std::vector<double>{0.25, 0.5, 1.0, 2.0}));
  EXPECT_TRUE(ValidateSurfel(e.surfel).empty());
}

TEST(SurfelTest, CollinearPointsDoubleTheRadius) {
  std::vector<LidarPoint> pts;
  for (int i = -40; i <= 40; ++i) {
    LidarPoint p;
    p.position = {0.05 * i, 0.0, 0.0};
    pts.push_back(p);
  }
  const SpatialIndex index = SpatialIndex::FromPoints(pts);
  const SurfelEstimate e = EstimateSurfelTraced(40, pts, index, {});
  // A line has no second principal spread at any radius.
  ASSERT_GE(e.radii_tried.size(), 2u);
  EXPECT_EQ(e.radii_tried[0], 0.25);
  EXPECT_EQ(e.radii_tried[1], 0.5);
  EXPECT_TRUE(e.fallback);
}

TEST(SurfelTest, GrowsUntilTheNeighborhoodSpreads) {
  // A line with two off-line points that only a 0.5 m radius reaches.
  std::vector<LidarPoint> pts;
  for (int i = -4; i <= 4; ++i) {
    LidarPoint p;
    p.position = {0.05 * i, 0.0, 0.0};
    pts.push_back(p);
  }
  for (double y : {-0.3, 0.3}) {
    LidarPoint p;
    p.position = {0.0, y, 0.0};
    pts.push_back(p);
  }
  const SpatialIndex index = SpatialIndex::FromPoints(pts);
  const SurfelEstimate e = EstimateSurfelTraced(4, pts, index, {});
  EXPECT_FALSE(e.fallback);
  EXPECT_EQ(e.radii_tried, (std::vector<double>{0.25, 0.5}));
  EXPECT_LT(AngleBetweenLines(e.surfel.normal, Eigen::Vector3d::UnitZ()),
            1e-6);
  EXPECT_DOUBLE_EQ(e.surfel.radius_tangent, 0.125);
}

TEST(SurfelTest, AspectFollowsSquareRootOfSigmaRatio) {
  // Uniform 1D spreads give sigma proportional to extent; sqrt(1/4) = 0.5.
  std::vector<LidarPoint> pts;
  for (int i = -10; i <= 10; ++i) {
    for (int j = -10; j <= 10; ++j) {
      LidarPoint p;
      p.position = {0.01 * i, 0.0025 * j, 0.0};
      pts.push_back(p);
    }
  }
  const SpatialIndex index = SpatialIndex::FromPoints(pts);
  SurfelEstimationParams params;
  params.max_neighbors = 10000;
  params.stddev_floor_min = 1e-4;
  params.stddev_floor_fraction = 1e-3;
  const SurfelEstimate e =
      EstimateSurfelTraced(pts.size() / 2, pts, index, params);
  ASSERT_FALSE(e.fallback);
  EXPECT_NEAR(e.surfel.radius_bitangent / e.surfel.radius_tangent, 0.5, 1e-9);
  EXPECT_LT(AngleBetweenLines(e.surfel.tangent, Eigen::Vector3d::UnitX()),
            1e-9);
}

TEST(SurfelTest, NormalSignRule) {
  // Vertical plane x = 0: normal is horizontal, so the x tie-break applies.
  std::vector<LidarPoint> pts;
  for (int i = -5; i <= 5; ++i) {
    for (int j = -5; j <= 5; ++j) {
      LidarPoint p;
      p.position = {0.0, 0.02 * i, 0.02 * j};
      pts.push_back(p);
    }
  }
  const SpatialIndex index = SpatialIndex::FromPoints(pts);
  for (const Surfel& s : EstimateAllSurfels(pts, index, {})) {
    EXPECT_EQ(s.normal.z(), 0.0);
    EXPECT_GT(s.normal.x(), 0.0);
  }
}

TEST(SurfelTest, ThreadCountDoesNotChangeOutput) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<LidarPoint> pts(3000);
  for (auto& p : pts) p.position = {u(rng), u(rng), 0.05 * std::sin(u(rng))};
  const SpatialIndex index = SpatialIndex::FromPoints(pts);
  SurfelEstimationParams params;
  params.rng_seed = 77;
  const auto one = EstimateAllSurfels(pts, index, params, 1);
  const auto eight = EstimateAllSurfels(pts, index, params, 8);
  ASSERT_EQ(one.size(), eight.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].normal, eight[i].normal);
    EXPECT_EQ(one[i].tangent, eight[i].tangent);
    EXPECT_EQ(one[i].radius_tangent, eight[i].radius_tangent);
    EXPECT_EQ(one[i].radius_bitangent, eight[i].radius_bitangent);
    EXPECT_EQ(EstimateSurfel(i, pts, index, params).normal, one[i].normal);
  }
}

TEST(SurfelTest, SingleAndParamChecks) {
  std::vector<LidarPoint> pts(1);
  const SpatialIndex index = SpatialIndex::FromPoints(pts);
  const auto s = EstimateAllSurfels(pts, index, {});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].normal, Eigen::Vector3d::UnitZ());
  SurfelEstimationParams bad;
  bad.initial_radius = 3.0;
  EXPECT_THROW(CheckSurfelParams(bad), InvalidArgument);
  bad = {};
  bad.min_neighbors = 2;
  EXPECT_THROW(CheckSurfelParams(bad), InvalidArgument);
}

TEST(SampleWithoutReplacementTest, DistinctSortedDeterministic) {
  const auto a = SampleWithoutReplacement(100, 32, 9, 4);
  EXPECT_EQ(a, SampleWithoutReplacement(100, 32, 9, 4));
  EXPECT_NE(a, SampleWithoutReplacement(100, 32, 9, 5));
  ASSERT_EQ(a.size(), 32u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<std::uint32_t>(a.begin(), a.end()).size(), 32u);
  EXPECT_LT(a.back(), 100u);
}

}  // namespace
}  // namespace lidarfuse
