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

#include "lidarfuse/depth_render.h"

#include <algorithm>
#include <cmath>

#include "lidarfuse/camera.h"
#include "lidarfuse/errors.h"
#include "lidarfuse/scene_io.h"

namespace lidarfuse {

namespace {

// Inclusive pixel span [first, last] of centers that may fall in [lo, hi].
// Widened by one pixel on each side and clamped to [0, size).
bool PixelSpan(double lo, double hi, int size, int* first, int* last) {
  const double f = std::floor(lo - 0.5) - 1.0;
  const double l = std::ceil(hi - 0.5) + 1.0;
  if (l < 0.0 || f > size - 1) return false;
  *first = static_cast<int>(std::max(f, 0.0));
  *last = static_cast<int>(std::min(l, static_cast<double>(size - 1)));
  return *first <= *last;
}

}  // namespace

void RasterizeSurfel(DepthImage* depth, const CameraFrame& camera,
                     const Eigen::Vector3d& position, const Surfel& surfel,
                     double dilation, const kernels::KernelSet& kernel_set) {
  if (!(dilation >= 1.0)) {
    throw InvalidArgument("rasterize: dilation must be >= 1");
  }
  const Eigen::Vector3d center = camera.Center();
  if (IsBackfacingFrom(center, position, surfel)) return;

  const auto& rot = camera.camera_from_world.rotation;
  const Eigen::Vector3d p = camera.camera_from_world.Apply(position);
  const Eigen::Vector3d n = rot * surfel.normal;
  const Eigen::Vector3d t = rot * surfel.tangent;
  const Eigen::Vector3d b = rot * surfel.Bitangent();
  const double ra = dilation * surfel.radius_tangent;
  const double rb = dilation * surfel.radius_bitangent;
  if (!(ra > 0.0) || !(rb > 0.0)) return;

  const auto& k = camera.intrinsics;
  kernels::DiskInCamera disk{};
  for (int i = 0; i < 3; ++i) {
    disk.center[i] = p[i];
    disk.normal[i] = n[i];
    disk.tangent[i] = t[i];
    disk.bitangent[i] = b[i];
  }
  disk.inv_sq_radius_tangent = 1.0 / (ra * ra);
  disk.inv_sq_radius_bitangent = 1.0 / (rb * rb);
  disk.normal_dot_center = n.dot(p);
  disk.fx = k.fx;
  disk.fy = k.fy;
  disk.cx = k.cx;
  disk.cy = k.cy;

  // Bounding box: the projection of the disk's bounding rectangle, whose
  // hull contains the projected ellipse whenever all corners are in front.
  int row0 = 0, row1 = k.height - 1, col0 = 0, col1 = k.width - 1;
  bool all_in_front = true;
  double umin = INFINITY, umax = -INFINITY, vmin = INFINITY, vmax = -INFINITY;
  for (int sa = -1; sa <= 1; sa += 2) {
    for (int sb = -1; sb <= 1; sb += 2) {
      const Eigen::Vector3d c = p + (sa * ra) * t + (sb * rb) * b;
      if (!(c.z() > 1e-9)) {
        all_in_front = false;
        break;
      }
      const double u = k.fx * c.x() / c.z() + k.cx;
      const double v = k.fy * c.y() / c.z() + k.cy;
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    if (!all_in_front) break;
  }
  if (all_in_front) {
    if (!PixelSpan(umin, umax, k.width, &col0, &col1)) return;
    if (!PixelSpan(vmin, vmax, k.height, &row0, &row1)) return;
  }

  for (int row = row0; row <= row1; ++row) {
    kernel_set.raster_row(disk, row, col0, col1 + 1, depth->Row(row));
  }
}

DepthImage RenderDepthImage(const CameraFrame& camera,
                            std::span<const std::uint32_t> candidates,
                            std::span<const LidarPoint> points,
                            std::span<const Surfel> surfels, double dilation,
                            double delta_t_thresh,
                            const kernels::KernelSet& kernel_set) {
  DepthImage depth(camera.intrinsics.width, camera.intrinsics.height);
  for (std::uint32_t j : candidates) {
    if (std::abs(camera.timestamp - points[j].timestamp) > delta_t_thresh) {
      continue;
    }
    RasterizeSurfel(&depth, camera, points[j].position, surfels[j], dilation,
                    kernel_set);
  }
  return depth;
}

void WriteDepthDebugPgm(const DepthImage& depth, const std::string& path) {
  std::vector<CategoryId> samples(depth.depth.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = depth.depth[i];
    samples[i] = std::isfinite(d)
                     ? static_cast<CategoryId>(
                           std::min(std::round(d * 1000.0), 65534.0))
                     : CategoryId{65535};
  }
  WritePgm16(path, depth.width, depth.height, samples);
}

}  // namespace lidarfuse
