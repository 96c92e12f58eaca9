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

namespace {

bool CpuHasAvx2() {
#if defined(LIDARFUSE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

}  // namespace

const KernelSet* Avx2Kernels() {
#if defined(LIDARFUSE_HAVE_AVX2)
  static const KernelSet kSet{"avx2", &internal::ProjectAvx2,
                              &internal::RasterRowAvx2};
  static const bool kSupported = CpuHasAvx2();
  return kSupported ? &kSet : nullptr;
#else
  return nullptr;
#endif
}

std::vector<const KernelSet*> AvailableKernels() {
  std::vector<const KernelSet*> out{&ScalarKernels()};
  if (const KernelSet* avx2 = Avx2Kernels()) out.push_back(avx2);
  return out;
}

const KernelSet& ActiveKernels() {
  static const KernelSet& kActive = []() -> const KernelSet& {
    if (const KernelSet* avx2 = Avx2Kernels()) return *avx2;
    return ScalarKernels();
  }();
  return kActive;
}

}  // namespace lidarfuse::kernels
