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

#include "kernels/kernels_internal.h"

namespace lidarfuse::kernels {
namespace internal {

void ProjectScalar(const PinholeModel& m, const double* x, const double* y,
                   const double* z, std::size_t n, double* u, double* v,
                   double* depth) {
  const double* r = m.rotation;
  for (std::size_t i = 0; i < n; ++i) {
    const double cam_x = r[0] * x[i] + r[1] * y[i] + r[2] * z[i] +
                         m.translation[0];
    const double cam_y = r[3] * x[i] + r[4] * y[i] + r[5] * z[i] +
                         m.translation[1];
    const double cam_z = r[6] * x[i] + r[7] * y[i] + r[8] * z[i] +
                         m.translation[2];
    u[i] = (m.fx * cam_x) / cam_z + m.cx;
    v[i] = (m.fy * cam_y) / cam_z + m.cy;
    depth[i] = cam_z;
  }
}

void RasterRowScalar(const DiskInCamera& d, int row, int col_begin,
                     int col_end, double* depth_row) {
  const double dy = ((static_cast<double>(row) + 0.5) - d.cy) / d.fy;
  const double ny_dy = d.normal[1] * dy;
  for (int col = col_begin; col < col_end; ++col) {
    const double dx = ((static_cast<double>(col) + 0.5) - d.cx) / d.fx;
    const double denom = d.normal[0] * dx + ny_dy + d.normal[2];
    const double t = d.normal_dot_center / denom;
    if (!(t > 0.0) || !(t < depth_row[col])) continue;
    const double qx = t * dx - d.center[0];
    const double qy = t * dy - d.center[1];
    const double qz = t - d.center[2];
    const double a = qx * d.tangent[0] + qy * d.tangent[1] + qz * d.tangent[2];
    const double b =
        qx * d.bitangent[0] + qy * d.bitangent[1] + qz * d.bitangent[2];
    const double e =
        a * a * d.inv_sq_radius_tangent + b * b * d.inv_sq_radius_bitangent;
    if (e <= 1.0) depth_row[col] = t;
  }
}

}  // namespace internal

const KernelSet& ScalarKernels() {
  static const KernelSet kSet{"scalar", &internal::ProjectScalar,
                              &internal::RasterRowScalar};
  return kSet;
}

}  // namespace lidarfuse::kernels
