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

// Data-parallel inner loops with a scalar reference and vectorized variants.
//
// Every variant evaluates the same IEEE operations in the same order (no
// fused multiply-add), so all variants are bit-identical to the scalar
// reference. Callers pick a variant once per process through
// ActiveKernels(); tests compare variants directly.

#ifndef LIDARFUSE_KERNELS_KERNELS_H_
#define LIDARFUSE_KERNELS_KERNELS_H_

#include <cstddef>
#include <string_view>
#include <vector>

namespace lidarfuse::kernels {

// Camera-from-world rotation (row-major) and translation plus pinhole
// intrinsics, flattened for kernel use.
struct PinholeModel {
  double rotation[9];
  double translation[3];
  double fx, fy, cx, cy;
};

// For each i < n: (X, Y, Z) = R * p_i + t, u = (fx * X) / Z + cx,
// v = (fy * Y) / Z + cy, depth = Z. u and v are meaningless when Z <= 0.
using ProjectFn = void (*)(const PinholeModel& model, const double* x,
                           const double* y, const double* z, std::size_t n,
                           double* u, double* v, double* depth);

// An elliptical disk expressed in camera coordinates, ready to be
// ray-cast against pixel-center rays.
struct DiskInCamera {
  double center[3];
  double normal[3];
  double tangent[3];
  double bitangent[3];
  double inv_sq_radius_tangent;    // 1 / a^2
  double inv_sq_radius_bitangent;  // 1 / b^2
  double normal_dot_center;
  double fx, fy, cx, cy;
};

// Ray-casts pixel centers (col + 0.5, row + 0.5) for col in
// [col_begin, col_end) against `disk` and lowers depth_row[col] to the
// camera-frame Z of the hit when the hit lies inside the ellipse, in front
// of the camera and nearer than the stored value.
using RasterRowFn = void (*)(const DiskInCamera& disk, int row, int col_begin,
                             int col_end, double* depth_row);

struct KernelSet {
  std::string_view name;
  ProjectFn project;
  RasterRowFn raster_row;
};

const KernelSet& ScalarKernels();

// Returns nullptr when the variant was not compiled in or the CPU lacks it.
const KernelSet* Avx2Kernels();

// Every variant usable on this machine, scalar first.
std::vector<const KernelSet*> AvailableKernels();

// Widest supported variant, chosen on first call.
const KernelSet& ActiveKernels();

}  // namespace lidarfuse::kernels

#endif  // LIDARFUSE_KERNELS_KERNELS_H_
