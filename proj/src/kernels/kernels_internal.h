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

#ifndef LIDARFUSE_SRC_KERNELS_KERNELS_INTERNAL_H_
#define LIDARFUSE_SRC_KERNELS_KERNELS_INTERNAL_H_

#include "lidarfuse/kernels/kernels.h"

namespace lidarfuse::kernels::internal {

void ProjectScalar(const PinholeModel& m, const double* x, const double* y,
                   const double* z, std::size_t n, double* u, double* v,
                   double* depth);
void RasterRowScalar(const DiskInCamera& d, int row, int col_begin,
                     int col_end, double* depth_row);

#if defined(LIDARFUSE_HAVE_AVX2)
void ProjectAvx2(const PinholeModel& m, const double* x, const double* y,
                 const double* z, std::size_t n, double* u, double* v,
                 double* depth);
void RasterRowAvx2(const DiskInCamera& d, int row, int col_begin, int col_end,
                   double* depth_row);
#endif

}  // namespace lidarfuse::kernels::internal

#endif  // LIDARFUSE_SRC_KERNELS_KERNELS_INTERNAL_H_
