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

#include "lidarfuse/spatial_index.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include "lidarfuse/errors.h"

namespace lidarfuse {

namespace {

constexpr std::uint32_t kLeafSize = 16;

double SquaredDistanceToBox(const Eigen::Vector3d& q,
                            const AxisAlignedBox& box) {
  double d2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    double d = 0.0;
    if (q[k] < box.min[k]) {
      d = box.min[k] - q[k];
    } else if (q[k] > box.max[k]) {
      d = q[k] - box.max[k];
    }
    d2 += d * d;
  }
  return d2;
}

}  // namespace

SpatialIndex::SpatialIndex(std::span<const Eigen::Vector3d> positions)
    : positions_(positions.begin(), positions.end()) {
  if (positions_.empty()) {
    throw InvalidArgument("spatial index requires at least one point");
  }
  ids_.resize(positions_.size());
  std::iota(ids_.begin(), ids_.end(), 0u);
  nodes_.reserve(2 * (positions_.size() / kLeafSize + 1));
  Build(0, static_cast<std::uint32_t>(positions_.size()));
}

SpatialIndex::SpatialIndex(std::span<const Eigen::Vector3d> positions,
                           std::span<const std::uint32_t> ids)
    : positions_(positions.begin(), positions.end()),
      ids_(ids.begin(), ids.end()) {
  if (positions_.empty()) {
    throw InvalidArgument("spatial index requires at least one point");
  }
  if (ids_.size() != positions_.size()) {
    throw InvalidArgument("spatial index: ids and positions differ in size");
  }
  nodes_.reserve(2 * (positions_.size() / kLeafSize + 1));
  Build(0, static_cast<std::uint32_t>(positions_.size()));
}

SpatialIndex SpatialIndex::FromPoints(std::span<const LidarPoint> points) {
  std::vector<Eigen::Vector3d> positions;
  positions.reserve(points.size());
  for (const auto& p : points) positions.push_back(p.position);
  return SpatialIndex(positions);
}

std::int32_t SpatialIndex::Build(std::uint32_t begin, std::uint32_t end) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.box.min = positions_[begin];
  node.box.max = positions_[begin];
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    node.box.min = node.box.min.cwiseMin(positions_[i]);
    node.box.max = node.box.max.cwiseMax(positions_[i]);
  }
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return index;

  int axis = 0;
  (node.box.max - node.box.min).maxCoeff(&axis);
  if (node.box.max[axis] == node.box.min[axis]) return index;  // all equal

  // Median split; permute positions and ids together, ties by id so the
  // layout is a pure function of the input.
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::vector<std::uint32_t> order(end - begin);
  std::iota(order.begin(), order.end(), begin);
  std::nth_element(order.begin(), order.begin() + (mid - begin), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double va = positions_[a][axis];
                     const double vb = positions_[b][axis];
                     return va < vb || (va == vb && ids_[a] < ids_[b]);
                   });
  std::vector<Eigen::Vector3d> pos_tmp;
  std::vector<std::uint32_t> id_tmp;
  pos_tmp.reserve(order.size());
  id_tmp.reserve(order.size());
  for (std::uint32_t o : order) {
    pos_tmp.push_back(positions_[o]);
    id_tmp.push_back(ids_[o]);
  }
  std::copy(pos_tmp.begin(), pos_tmp.end(), positions_.begin() + begin);
  std::copy(id_tmp.begin(), id_tmp.end(), ids_.begin() + begin);

  const std::int32_t left = Build(begin, mid);
  const std::int32_t right = Build(mid, end);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

std::vector<std::uint32_t> SpatialIndex::RadiusQuery(
    const Eigen::Vector3d& center, double radius) const {
  std::vector<std::uint32_t> out;
  RadiusQuery(center, radius, &out);
  return out;
}

void SpatialIndex::RadiusQuery(const Eigen::Vector3d& center, double radius,
                               std::vector<std::uint32_t>* out) const {
  out->clear();
  if (!(radius >= 0.0)) return;
  const double r2 = radius * radius;
  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (SquaredDistanceToBox(center, node.box) > r2) continue;
    if (node.left < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        if ((positions_[i] - center).squaredNorm() <= r2) {
          out->push_back(ids_[i]);
        }
      }
      continue;
    }
    stack[top++] = node.right;
    stack[top++] = node.left;
  }
  std::sort(out->begin(), out->end());
}

std::uint32_t SpatialIndex::Nearest(const Eigen::Vector3d& query) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  std::uint32_t best_id = std::numeric_limits<std::uint32_t>::max();
  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (SquaredDistanceToBox(query, node.box) > best_d2) continue;
    if (node.left < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const double d2 = (positions_[i] - query).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && ids_[i] < best_id)) {
          best_d2 = d2;
          best_id = ids_[i];
        }
      }
      continue;
    }
    // Descend into the nearer child first.
    const Node& l = nodes_[node.left];
    const Node& r = nodes_[node.right];
    if (SquaredDistanceToBox(query, l.box) <= SquaredDistanceToBox(query, r.box)) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return best_id;
}

void SpatialIndex::CollectCandidates(
    const std::function<bool(const AxisAlignedBox&)>& may_contain,
    std::vector<std::uint32_t>* out) const {
  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!may_contain(node.box)) continue;
    if (node.left < 0) {
      out->insert(out->end(), ids_.begin() + node.begin,
                  ids_.begin() + node.end);
      continue;
    }
    stack[top++] = node.right;
    stack[top++] = node.left;
  }
}

}  // namespace lidarfuse
