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

#ifndef LIDARFUSE_CAMERA_H_
#define LIDARFUSE_CAMERA_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lidarfuse/kernels/kernels.h"
#include "lidarfuse/scene.h"
#include "lidarfuse/spatial_index.h"

namespace lidarfuse {

// Continuous pixel coordinates and camera-frame Z.
struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

// Cosine below which a surfel counts as seen edge-on.
inline constexpr double kGrazingEpsilon = 1e-3;

kernels::PinholeModel ToPinholeModel(const CameraFrame& camera);

// Pinhole projection without distortion. Returns nullopt when the point is
// behind the camera (Z <= 0) or lands outside [0, width) x [0, height).
std::optional<Projection> Project(const CameraFrame& camera,
                                  const Eigen::Vector3d& world_position);

bool InView(const Intrinsics& intrinsics, const Projection& p);

// Indices of points within d_max of the camera center that project inside
// the image, ascending.
std::vector<std::uint32_t> FrustumSelect(
    const CameraFrame& camera, double d_max, const SpatialIndex& index,
    std::span<const LidarPoint> points,
    const kernels::KernelSet& kernel_set = kernels::ActiveKernels());

// Two-sided test: true only when the camera sees the disk edge-on, i.e.
// |normal . unit(camera_center - position)| <= grazing_epsilon.
bool IsBackfacing(const CameraFrame& camera, const Eigen::Vector3d& position,
                  const Surfel& surfel,
                  double grazing_epsilon = kGrazingEpsilon);

// Same test against a precomputed camera center.
bool IsBackfacingFrom(const Eigen::Vector3d& camera_center,
                      const Eigen::Vector3d& position, const Surfel& surfel,
                      double grazing_epsilon = kGrazingEpsilon);

}  // namespace lidarfuse

#endif  // LIDARFUSE_CAMERA_H_
