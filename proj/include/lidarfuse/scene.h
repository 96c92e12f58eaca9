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

#ifndef LIDARFUSE_SCENE_H_
#define LIDARFUSE_SCENE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace lidarfuse {

using CategoryId = std::uint16_t;

// Reserved id meaning "unlabeled / none". Never a taxonomy entry.
inline constexpr CategoryId kUnlabeled = 65535;

struct LidarPoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // meters, world frame
  double timestamp = 0.0;                              // scene-relative seconds
  int sensor_id = 0;                                   // carried, unused
};

// Oriented disk approximating the surface around one lidar point. The
// bitangent is normal x tangent.
struct Surfel {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d tangent = Eigen::Vector3d::UnitX();
  double radius_tangent = 0.0;
  double radius_bitangent = 0.0;

  Eigen::Vector3d Bitangent() const { return normal.cross(tangent); }
};

struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
};

// Rigid camera-from-world transform: p_cam = rotation * p_world + translation.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d Apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
};

struct CameraFrame {
  std::int64_t frame_id = 0;
  double timestamp = 0.0;
  Intrinsics intrinsics;
  RigidTransform camera_from_world;

  // Camera center in world coordinates.
  Eigen::Vector3d Center() const {
    return -(camera_from_world.rotation.transpose() *
             camera_from_world.translation);
  }
};

struct LabelImage {
  int width = 0;
  int height = 0;
  std::vector<CategoryId> categories;  // row-major, width * height

  LabelImage() = default;
  LabelImage(int w, int h, CategoryId fill = kUnlabeled)
      : width(w), height(h),
        categories(static_cast<std::size_t>(w) * static_cast<std::size_t>(h),
                   fill) {}

  CategoryId At(int row, int col) const {
    return categories[static_cast<std::size_t>(row) * width + col];
  }
  CategoryId& At(int row, int col) {
    return categories[static_cast<std::size_t>(row) * width + col];
  }

  bool operator==(const LabelImage&) const = default;
};

struct TaxonomyEntry {
  CategoryId id = 0;
  std::string name;
  bool is_mover = false;
  bool is_ignore = false;

  bool operator==(const TaxonomyEntry&) const = default;
};

class ClassTaxonomy {
 public:
  ClassTaxonomy() = default;
  explicit ClassTaxonomy(std::vector<TaxonomyEntry> entries)
      : entries_(std::move(entries)) {}

  const std::vector<TaxonomyEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  bool Contains(CategoryId id) const { return Find(id) != nullptr; }
  const TaxonomyEntry* Find(CategoryId id) const;
  // Position of `id` in entries(), if present.
  std::optional<std::size_t> IndexOf(CategoryId id) const;
  std::optional<CategoryId> IdByName(const std::string& name) const;
  // One past the largest id; dense per-category arrays use this length.
  std::size_t IdBound() const;

  bool operator==(const ClassTaxonomy&) const = default;

 private:
  std::vector<TaxonomyEntry> entries_;
};

struct SceneBundle {
  std::vector<LidarPoint> points;
  std::vector<CameraFrame> cameras;
  std::vector<LabelImage> label_images;  // one per camera, same order
  ClassTaxonomy taxonomy;
};

enum class ViolationKind {
  kNonFinitePoint,
  kIntrinsics,
  kRotation,
  kNonFiniteCamera,
  kDimensionMismatch,
  kUnknownCategory,
  kCountMismatch,
  kEmptyPoints,
  kTaxonomy,
  kSurfel,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

// Checks every type invariant. Violations are reported as data; an empty
// report means the bundle is safe for every downstream operation.
std::vector<Violation> ValidateScene(const SceneBundle& bundle);

// Per-type checks, used by ValidateScene and by readers.
std::vector<Violation> ValidateTaxonomy(const ClassTaxonomy& taxonomy);
std::vector<Violation> ValidateCamera(const CameraFrame& camera);
std::vector<Violation> ValidateSurfel(const Surfel& surfel);

}  // namespace lidarfuse

#endif  // LIDARFUSE_SCENE_H_
