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

#include <limits>

#include <gtest/gtest.h>

#include "lidarfuse/scene.h"
#include "test_util.h"

namespace lidarfuse {
namespace {

using testing::IdentityCamera;
using testing::SmallTaxonomy;

SceneBundle TwoPointScene() {
  SceneBundle s;
  s.points.resize(2);
  s.points[1].position = {1, 2, 3};
  s.cameras.push_back(IdentityCamera(100, 20, 10));
  s.label_images.emplace_back(20, 10, 0);
  s.taxonomy = SmallTaxonomy();
  return s;
}

bool HasKind(const std::vector<Violation>& v, ViolationKind kind) {
  for (const Violation& x : v) {
    if (x.kind == kind) return true;
  }
  return false;
}

TEST(ValidateSceneTest, WellFormedBundleIsClean) {
  EXPECT_TRUE(ValidateScene(TwoPointScene()).empty());
}

TEST(ValidateSceneTest, ZeroFocalLengthIsOneIntrinsicsViolation) {
  SceneBundle s = TwoPointScene();
  s.cameras[0].intrinsics.fx = 0.0;
  const auto v = ValidateScene(s);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::kIntrinsics);
}

TEST(ValidateSceneTest, LabelImageSizeMismatch) {
  SceneBundle s = TwoPointScene();
  s.cameras[0].intrinsics = {100, 100, 10, 10, 20, 20};
  s.label_images[0] = LabelImage(10, 10, 0);
  EXPECT_TRUE(HasKind(ValidateScene(s), ViolationKind::kDimensionMismatch));
}

TEST(ValidateSceneTest, DetectsEachInvariant) {
  SceneBundle s = TwoPointScene();
  s.points[0].position.x() = std::numeric_limits<double>::quiet_NaN();
  EXPECT_TRUE(HasKind(ValidateScene(s), ViolationKind::kNonFinitePoint));

  s = TwoPointScene();
  s.points.clear();
  EXPECT_TRUE(HasKind(ValidateScene(s), ViolationKind::kEmptyPoints));

  s = TwoPointScene();
  s.label_images.clear();
  EXPECT_TRUE(HasKind(ValidateScene(s), ViolationKind::kCountMismatch));

  s = TwoPointScene();
  s.cameras[0].camera_from_world.rotation(0, 1) = 0.5;
  EXPECT_TRUE(HasKind(ValidateScene(s), ViolationKind::kRotation));

  s = TwoPointScene();
  s.label_images[0].At(3, 4) = 42;
  EXPECT_TRUE(HasKind(ValidateScene(s), ViolationKind::kUnknownCategory));

  s = TwoPointScene();
  s.label_images[0].At(3, 4) = kUnlabeled;
  EXPECT_TRUE(ValidateScene(s).empty());

  s = TwoPointScene();
  s.cameras[0].intrinsics.cx = 20.0;  // must be < width
  EXPECT_TRUE(HasKind(ValidateScene(s), ViolationKind::kIntrinsics));
}

TEST(ValidateTaxonomyTest, DuplicateAndSentinelIds) {
  EXPECT_TRUE(ValidateTaxonomy(SmallTaxonomy()).empty());
  EXPECT_FALSE(ValidateTaxonomy(ClassTaxonomy({{1, "a", false, false},
                                               {1, "b", false, false}}))
                   .empty());
  EXPECT_FALSE(
      ValidateTaxonomy(ClassTaxonomy({{kUnlabeled, "x", false, false}}))
          .empty());
}

TEST(ValidateSurfelTest, Invariants) {
  Surfel s;
  s.radius_tangent = 0.1;
  s.radius_bitangent = 0.05;
  EXPECT_TRUE(ValidateSurfel(s).empty());
  Surfel wide = s;
  wide.radius_bitangent = 0.2;
  EXPECT_FALSE(ValidateSurfel(wide).empty());
  Surfel skew = s;
  skew.tangent = Eigen::Vector3d(1, 0, 0.1).normalized();
  EXPECT_FALSE(ValidateSurfel(skew).empty());
  Surfel flat = s;
  flat.radius_tangent = 0.0;
  flat.radius_bitangent = 0.0;
  EXPECT_FALSE(ValidateSurfel(flat).empty());
}

TEST(ClassTaxonomyTest, Lookups) {
  const ClassTaxonomy t = SmallTaxonomy();
  EXPECT_EQ(t.IdBound(), 4u);
  EXPECT_EQ(*t.IdByName("car"), 1);
  EXPECT_FALSE(t.IdByName("bus").has_value());
  EXPECT_EQ(*t.IndexOf(2), 2u);
  EXPECT_TRUE(t.Find(1)->is_mover);
  EXPECT_FALSE(t.Contains(7));
}

TEST(CameraFrameTest, CenterInvertsPose) {
  CameraFrame cam = IdentityCamera();
  cam.camera_from_world.rotation =
      Eigen::AngleAxisd(0.3, Eigen::Vector3d(1, 2, 3).normalized())
          .toRotationMatrix();
  const Eigen::Vector3d eye(4, -1, 2);
  cam.camera_from_world.translation = -(cam.camera_from_world.rotation * eye);
  EXPECT_LT((cam.Center() - eye).norm(), 1e-12);
}

}  // namespace
}  // namespace lidarfuse
