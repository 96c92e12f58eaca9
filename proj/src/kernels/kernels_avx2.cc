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

// Built with -mavx2 but without -mfma: every multiply and add is rounded
// separately, matching kernels_scalar.cc bit for bit.

#include <immintrin.h>

#include "kernels/kernels_internal.h"

namespace lidarfuse::kernels::internal {

namespace {

// ((a0 * x + a1 * y) + a2 * z) + b, in the scalar evaluation order.
inline __m256d AffineRow(__m256d a0, __m256d a1, __m256d a2, __m256d b,
                         __m256d x, __m256d y, __m256d z) {
  __m256d acc = _mm256_add_pd(_mm256_mul_pd(a0, x), _mm256_mul_pd(a1, y));
  acc = _mm256_add_pd(acc, _mm256_mul_pd(a2, z));
  return _mm256_add_pd(acc, b);
}

// (a0 * x + a1 * y) + a2 * z.
inline __m256d Dot3(__m256d a0, __m256d a1, __m256d a2, __m256d x, __m256d y,
                    __m256d z) {
  const __m256d acc =
      _mm256_add_pd(_mm256_mul_pd(a0, x), _mm256_mul_pd(a1, y));
  return _mm256_add_pd(acc, _mm256_mul_pd(a2, z));
}

}  // namespace

void ProjectAvx2(const PinholeModel& m, const double* x, const double* y,
                 const double* z, std::size_t n, double* u, double* v,
                 double* depth) {
  const double* r = m.rotation;
  const __m256d r0 = _mm256_set1_pd(r[0]), r1 = _mm256_set1_pd(r[1]),
                r2 = _mm256_set1_pd(r[2]), r3 = _mm256_set1_pd(r[3]),
                r4 = _mm256_set1_pd(r[4]), r5 = _mm256_set1_pd(r[5]),
                r6 = _mm256_set1_pd(r[6]), r7 = _mm256_set1_pd(r[7]),
                r8 = _mm256_set1_pd(r[8]);
  const __m256d t0 = _mm256_set1_pd(m.translation[0]);
  const __m256d t1 = _mm256_set1_pd(m.translation[1]);
  const __m256d t2 = _mm256_set1_pd(m.translation[2]);
  const __m256d fx = _mm256_set1_pd(m.fx), fy = _mm256_set1_pd(m.fy);
  const __m256d cx = _mm256_set1_pd(m.cx), cy = _mm256_set1_pd(m.cy);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d px = _mm256_loadu_pd(x + i);
    const __m256d py = _mm256_loadu_pd(y + i);
    const __m256d pz = _mm256_loadu_pd(z + i);
    const __m256d cam_x = AffineRow(r0, r1, r2, t0, px, py, pz);
    const __m256d cam_y = AffineRow(r3, r4, r5, t1, px, py, pz);
    const __m256d cam_z = AffineRow(r6, r7, r8, t2, px, py, pz);
    _mm256_storeu_pd(
        u + i, _mm256_add_pd(_mm256_div_pd(_mm256_mul_pd(fx, cam_x), cam_z),
                             cx));
    _mm256_storeu_pd(
        v + i, _mm256_add_pd(_mm256_div_pd(_mm256_mul_pd(fy, cam_y), cam_z),
                             cy));
    _mm256_storeu_pd(depth + i, cam_z);
  }
  if (i < n) ProjectScalar(m, x + i, y + i, z + i, n - i, u + i, v + i, depth + i);
}

void RasterRowAvx2(const DiskInCamera& d, int row, int col_begin, int col_end,
                   double* depth_row) {
  const double dy_scalar = ((static_cast<double>(row) + 0.5) - d.cy) / d.fy;
  const __m256d dy = _mm256_set1_pd(dy_scalar);
  const __m256d ny_dy = _mm256_set1_pd(d.normal[1] * dy_scalar);
  const __m256d nx = _mm256_set1_pd(d.normal[0]);
  const __m256d nz = _mm256_set1_pd(d.normal[2]);
  const __m256d ndc = _mm256_set1_pd(d.normal_dot_center);
  const __m256d cxv = _mm256_set1_pd(d.cx), fxv = _mm256_set1_pd(d.fx);
  const __m256d px = _mm256_set1_pd(d.center[0]);
  const __m256d py = _mm256_set1_pd(d.center[1]);
  const __m256d pz = _mm256_set1_pd(d.center[2]);
  const __m256d tx = _mm256_set1_pd(d.tangent[0]);
  const __m256d ty = _mm256_set1_pd(d.tangent[1]);
  const __m256d tz = _mm256_set1_pd(d.tangent[2]);
  const __m256d bx = _mm256_set1_pd(d.bitangent[0]);
  const __m256d by = _mm256_set1_pd(d.bitangent[1]);
  const __m256d bz = _mm256_set1_pd(d.bitangent[2]);
  const __m256d ia = _mm256_set1_pd(d.inv_sq_radius_tangent);
  const __m256d ib = _mm256_set1_pd(d.inv_sq_radius_bitangent);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d lane_offsets = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);

  int col = col_begin;
  for (; col + 4 <= col_end; col += 4) {
    const __m256d cols =
        _mm256_add_pd(_mm256_set1_pd(static_cast<double>(col)), lane_offsets);
    const __m256d dx =
        _mm256_div_pd(_mm256_sub_pd(_mm256_add_pd(cols, half), cxv), fxv);
    const __m256d denom =
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(nx, dx), ny_dy), nz);
    const __m256d t = _mm256_div_pd(ndc, denom);
    const __m256d current = _mm256_loadu_pd(depth_row + col);
    __m256d mask = _mm256_and_pd(_mm256_cmp_pd(t, zero, _CMP_GT_OQ),
                                 _mm256_cmp_pd(t, current, _CMP_LT_OQ));
    if (_mm256_movemask_pd(mask) == 0) continue;
    const __m256d qx = _mm256_sub_pd(_mm256_mul_pd(t, dx), px);
    const __m256d qy = _mm256_sub_pd(_mm256_mul_pd(t, dy), py);
    const __m256d qz = _mm256_sub_pd(t, pz);
    const __m256d a = Dot3(qx, qy, qz, tx, ty, tz);
    const __m256d b = Dot3(qx, qy, qz, bx, by, bz);
    const __m256d e = _mm256_add_pd(_mm256_mul_pd(_mm256_mul_pd(a, a), ia),
                                    _mm256_mul_pd(_mm256_mul_pd(b, b), ib));
    mask = _mm256_and_pd(mask, _mm256_cmp_pd(e, one, _CMP_LE_OQ));
    _mm256_storeu_pd(depth_row + col, _mm256_blendv_pd(current, t, mask));
  }
  if (col < col_end) RasterRowScalar(d, row, col, col_end, depth_row);
}

}  // namespace lidarfuse::kernels::internal
