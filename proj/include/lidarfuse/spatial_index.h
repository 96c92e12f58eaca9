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

#ifndef LIDARFUSE_SPATIAL_INDEX_H_
#define LIDARFUSE_SPATIAL_INDEX_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lidarfuse/scene.h"

namespace lidarfuse {

struct AxisAlignedBox {
  Eigen::Vector3d min;
  Eigen::Vector3d max;
};

// Immutable k-d tree over 3D positions. Each position carries an id
// (its index in the source list unless ids are supplied); queries return ids.
class SpatialIndex {
 public:
  // Throws InvalidArgument when `positions` is empty or sizes differ.
  explicit SpatialIndex(std::span<const Eigen::Vector3d> positions);
  SpatialIndex(std::span<const Eigen::Vector3d> positions,
               std::span<const std::uint32_t> ids);

  static SpatialIndex FromPoints(std::span<const LidarPoint> points);

  std::size_t size() const { return ids_.size(); }

  // Ids of all positions p with |p - center| <= radius, ascending.
  std::vector<std::uint32_t> RadiusQuery(const Eigen::Vector3d& center,
                                         double radius) const;
  // Same, reusing `out` (cleared first).
  void RadiusQuery(const Eigen::Vector3d& center, double radius,
                   std::vector<std::uint32_t>* out) const;

  // Id of the nearest position; equal distances resolve to the lowest id.
  std::uint32_t Nearest(const Eigen::Vector3d& query) const;

  // Appends the ids under every leaf whose bounding box is not rejected by
  // `may_contain`. The result is a superset filter; callers apply their own
  // exact per-point test. Order is unspecified.
  void CollectCandidates(
      const std::function<bool(const AxisAlignedBox&)>& may_contain,
      std::vector<std::uint32_t>* out) const;

 private:
  struct Node {
    AxisAlignedBox box;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
  };

  std::int32_t Build(std::uint32_t begin, std::uint32_t end);

  std::vector<Eigen::Vector3d> positions_;  // permuted into tree order
  std::vector<std::uint32_t> ids_;          // permuted alongside positions_
  std::vector<Node> nodes_;
};

}  // namespace lidarfuse

#endif  // LIDARFUSE_SPATIAL_INDEX_H_
