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

#ifndef LIDARFUSE_DEPTH_RENDER_H_
#define LIDARFUSE_DEPTH_RENDER_H_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lidarfuse/kernels/kernels.h"
#include "lidarfuse/scene.h"

namespace lidarfuse {

// Per-pixel camera-frame Z of the nearest rendered surface; +infinity where
// nothing was drawn.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> depth;

  DepthImage() = default;
  DepthImage(int w, int h)
      : width(w),
        height(h),
        depth(static_cast<std::size_t>(w) * static_cast<std::size_t>(h),
              std::numeric_limits<double>::infinity()) {}

  double At(int row, int col) const {
    return depth[static_cast<std::size_t>(row) * width + col];
  }
  double* Row(int row) { return depth.data() + static_cast<std::size_t>(row) * width; }

  bool operator==(const DepthImage&) const = default;
};

// Draws the surfel at `position`, its radii scaled by `dilation`, into
// `depth` with a z-buffer min. Pixel (row, col) is sampled at its center
// (col + 0.5, row + 0.5). Edge-on surfels are skipped. Throws
// InvalidArgument when dilation < 1.
void RasterizeSurfel(DepthImage* depth, const CameraFrame& camera,
                     const Eigen::Vector3d& position, const Surfel& surfel,
                     double dilation,
                     const kernels::KernelSet& kernel_set =
                         kernels::ActiveKernels());

// Renders every candidate whose timestamp is within delta_t_thresh of the
// camera. The result does not depend on candidate order.
DepthImage RenderDepthImage(const CameraFrame& camera,
                            std::span<const std::uint32_t> candidates,
                            std::span<const LidarPoint> points,
                            std::span<const Surfel> surfels, double dilation,
                            double delta_t_thresh,
                            const kernels::KernelSet& kernel_set =
                                kernels::ActiveKernels());

// Debug dump: 16-bit PGM of depth in millimeters, saturated at 65534; empty
// pixels are 65535. Lossy by construction.
void WriteDepthDebugPgm(const DepthImage& depth, const std::string& path);

}  // namespace lidarfuse

#endif  // LIDARFUSE_DEPTH_RENDER_H_
