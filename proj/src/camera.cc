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

#include "lidarfuse/camera.h"

#include <algorithm>
#include <cmath>

namespace lidarfuse {

namespace {

double SquaredDistanceToBox(const Eigen::Vector3d& q,
                            const AxisAlignedBox& box) {
  return (q.cwiseMax(box.min).cwiseMin(box.max) - q).squaredNorm();
}

}  // namespace

kernels::PinholeModel ToPinholeModel(const CameraFrame& camera) {
  kernels::PinholeModel m{};
  const auto& r = camera.camera_from_world.rotation;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) m.rotation[3 * row + col] = r(row, col);
    m.translation[row] = camera.camera_from_world.translation[row];
  }
  m.fx = camera.intrinsics.fx;
  m.fy = camera.intrinsics.fy;
  m.cx = camera.intrinsics.cx;
  m.cy = camera.intrinsics.cy;
  return m;
}

bool InView(const Intrinsics& k, const Projection& p) {
  return p.depth > 0.0 && p.u >= 0.0 && p.u < k.width && p.v >= 0.0 &&
         p.v < k.height;
}

std::optional<Projection> Project(const CameraFrame& camera,
                                  const Eigen::Vector3d& world_position) {
  // Routed through the scalar kernel so that single-point and batch
  // projections agree bit for bit.
  const kernels::PinholeModel model = ToPinholeModel(camera);
  Projection p;
  kernels::ScalarKernels().project(model, &world_position.x(),
                                   &world_position.y(), &world_position.z(), 1,
                                   &p.u, &p.v, &p.depth);
  if (!InView(camera.intrinsics, p)) return std::nullopt;
  return p;
}

std::vector<std::uint32_t> FrustumSelect(const CameraFrame& camera,
                                         double d_max,
                                         const SpatialIndex& index,
                                         std::span<const LidarPoint> points,
                                         const kernels::KernelSet& kernel_set) {
  const Eigen::Vector3d center = camera.Center();
  const double d_max2 = d_max * d_max;
  const auto& k = camera.intrinsics;
  const auto& rot = camera.camera_from_world.rotation;
  const auto& trans = camera.camera_from_world.translation;

  // Conservative node culling: a node is dropped only when it lies wholly
  // outside the distance sphere, wholly behind the camera, or wholly outside
  // one image-border half-space widened by one pixel.
  auto may_contain = [&](const AxisAlignedBox& box) {
    if (SquaredDistanceToBox(center, box) > d_max2 * (1.0 + 1e-9)) {
      return false;
    }
    int behind = 0, left = 0, right = 0, top = 0, bottom = 0;
    for (int c = 0; c < 8; ++c) {
      const Eigen::Vector3d corner((c & 1) ? box.max.x() : box.min.x(),
                                   (c & 2) ? box.max.y() : box.min.y(),
                                   (c & 4) ? box.max.z() : box.min.z());
      const Eigen::Vector3d p = rot * corner + trans;
      behind += p.z() < -1e-9;
      left += k.fx * p.x() + (k.cx + 1.0) * p.z() < 0.0;
      right += k.fx * p.x() + (k.cx - k.width - 1.0) * p.z() > 0.0;
      top += k.fy * p.y() + (k.cy + 1.0) * p.z() < 0.0;
      bottom += k.fy * p.y() + (k.cy - k.height - 1.0) * p.z() > 0.0;
    }
    return behind < 8 && left < 8 && right < 8 && top < 8 && bottom < 8;
  };

  std::vector<std::uint32_t> candidates;
  index.CollectCandidates(may_contain, &candidates);
  std::sort(candidates.begin(), candidates.end());

  const std::size_t n = candidates.size();
  std::vector<double> buffer(6 * n);
  double* xs = buffer.data();
  double* ys = xs + n;
  double* zs = ys + n;
  double* us = zs + n;
  double* vs = us + n;
  double* ds = vs + n;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d& p = points[candidates[i]].position;
    xs[i] = p.x();
    ys[i] = p.y();
    zs[i] = p.z();
  }
  kernel_set.project(ToPinholeModel(camera), xs, ys, zs, n, us, vs, ds);

  std::vector<std::uint32_t> selected;
  selected.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Projection p{us[i], vs[i], ds[i]};
    if (!InView(k, p)) continue;
    if ((center - points[candidates[i]].position).squaredNorm() > d_max2) {
      continue;
    }
    selected.push_back(candidates[i]);
  }
  return selected;
}

bool IsBackfacing(const CameraFrame& camera, const Eigen::Vector3d& position,
                  const Surfel& surfel, double grazing_epsilon) {
  return IsBackfacingFrom(camera.Center(), position, surfel, grazing_epsilon);
}

bool IsBackfacingFrom(const Eigen::Vector3d& camera_center,
                      const Eigen::Vector3d& position, const Surfel& surfel,
                      double grazing_epsilon) {
  const Eigen::Vector3d view = camera_center - position;
  const double len = view.norm();
  if (!(len > 0.0)) return true;
  return std::abs(surfel.normal.dot(view)) / len <= grazing_epsilon;
}

}  // namespace lidarfuse
