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

#include "lidarfuse/scene.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace lidarfuse {

const TaxonomyEntry* ClassTaxonomy::Find(CategoryId id) const {
  for (const auto& e : entries_) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::optional<std::size_t> ClassTaxonomy::IndexOf(CategoryId id) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<CategoryId> ClassTaxonomy::IdByName(
    const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e.id;
  }
  return std::nullopt;
}

std::size_t ClassTaxonomy::IdBound() const {
  std::size_t bound = 0;
  for (const auto& e : entries_) {
    bound = std::max<std::size_t>(bound, std::size_t{e.id} + 1);
  }
  return bound;
}

std::vector<Violation> ValidateTaxonomy(const ClassTaxonomy& taxonomy) {
  std::vector<Violation> out;
  std::set<CategoryId> seen;
  for (const auto& e : taxonomy.entries()) {
    if (e.id == kUnlabeled) {
      out.push_back({ViolationKind::kTaxonomy,
                     "taxonomy entry '" + e.name + "' uses reserved id 65535"});
    }
    if (!seen.insert(e.id).second) {
      out.push_back({ViolationKind::kTaxonomy,
                     "duplicate taxonomy id " + std::to_string(e.id)});
    }
  }
  return out;
}

std::vector<Violation> ValidateCamera(const CameraFrame& camera) {
  std::vector<Violation> out;
  const auto& k = camera.intrinsics;
  const std::string tag = "camera " + std::to_string(camera.frame_id) + ": ";
  if (!(k.fx > 0.0) || !(k.fy > 0.0) || !std::isfinite(k.fx) ||
      !std::isfinite(k.fy)) {
    out.push_back({ViolationKind::kIntrinsics,
                   tag + "focal lengths must be positive and finite"});
  }
  if (k.width <= 0 || k.height <= 0) {
    out.push_back({ViolationKind::kIntrinsics,
                   tag + "image dimensions must be positive"});
  } else if (!(k.cx >= 0.0 && k.cx < k.width && k.cy >= 0.0 &&
               k.cy < k.height)) {
    out.push_back({ViolationKind::kIntrinsics,
                   tag + "principal point outside the image"});
  }
  const auto& r = camera.camera_from_world.rotation;
  const auto& t = camera.camera_from_world.translation;
  if (!r.allFinite() || !t.allFinite() || !std::isfinite(camera.timestamp)) {
    out.push_back({ViolationKind::kNonFiniteCamera,
                   tag + "non-finite pose or timestamp"});
  } else if (!((r.transpose() * r - Eigen::Matrix3d::Identity())
                   .cwiseAbs()
                   .maxCoeff() <= 1e-9) ||
             !(r.determinant() > 0.0)) {
    out.push_back({ViolationKind::kRotation,
                   tag + "rotation is not orthonormal"});
  }
  return out;
}

std::vector<Violation> ValidateSurfel(const Surfel& s) {
  std::vector<Violation> out;
  if (!(std::abs(s.normal.norm() - 1.0) <= 1e-9) ||
      !(std::abs(s.tangent.norm() - 1.0) <= 1e-9)) {
    out.push_back({ViolationKind::kSurfel, "surfel axes are not unit"});
  }
  if (!(std::abs(s.normal.dot(s.tangent)) <= 1e-9)) {
    out.push_back({ViolationKind::kSurfel,
                   "surfel tangent not orthogonal to normal"});
  }
  if (!(s.radius_tangent > 0.0) || !(s.radius_bitangent > 0.0) ||
      !(s.radius_bitangent <= s.radius_tangent)) {
    out.push_back({ViolationKind::kSurfel,
                   "surfel radii must satisfy 0 < bitangent <= tangent"});
  }
  return out;
}

std::vector<Violation> ValidateScene(const SceneBundle& bundle) {
  std::vector<Violation> out = ValidateTaxonomy(bundle.taxonomy);

  if (bundle.points.empty()) {
    out.push_back({ViolationKind::kEmptyPoints, "scene has no points"});
  }
  for (std::size_t i = 0; i < bundle.points.size(); ++i) {
    const auto& p = bundle.points[i];
    if (!p.position.allFinite() || !std::isfinite(p.timestamp)) {
      out.push_back({ViolationKind::kNonFinitePoint,
                     "point " + std::to_string(i) + " is not finite"});
    }
  }

  for (const auto& cam : bundle.cameras) {
    auto v = ValidateCamera(cam);
    out.insert(out.end(), v.begin(), v.end());
  }

  if (bundle.cameras.size() != bundle.label_images.size()) {
    out.push_back({ViolationKind::kCountMismatch,
                   std::to_string(bundle.cameras.size()) + " cameras but " +
                       std::to_string(bundle.label_images.size()) +
                       " label images"});
    return out;
  }

  for (std::size_t i = 0; i < bundle.cameras.size(); ++i) {
    const auto& k = bundle.cameras[i].intrinsics;
    const auto& img = bundle.label_images[i];
    if (img.width != k.width || img.height != k.height ||
        img.categories.size() !=
            static_cast<std::size_t>(img.width) * img.height) {
      out.push_back(
          {ViolationKind::kDimensionMismatch,
           "label image " + std::to_string(i) + " is " +
               std::to_string(img.width) + "x" + std::to_string(img.height) +
               " but camera is " + std::to_string(k.width) + "x" +
               std::to_string(k.height)});
      continue;
    }
    // Report the first offending id per image only.
    for (CategoryId id : img.categories) {
      if (id != kUnlabeled && !bundle.taxonomy.Contains(id)) {
        out.push_back({ViolationKind::kUnknownCategory,
                       "label image " + std::to_string(i) +
                           " contains unknown category " +
                           std::to_string(id)});
        break;
      }
    }
  }
  return out;
}

}  // namespace lidarfuse
