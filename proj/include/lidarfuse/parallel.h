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

#ifndef LIDARFUSE_PARALLEL_H_
#define LIDARFUSE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace lidarfuse {

// Hardware concurrency, at least 1.
int DefaultThreadCount();

// Calls fn(begin, end) on disjoint chunks covering [0, n). Chunks are
// claimed dynamically by up to `threads` workers, so callers must write only
// to per-index (or per-chunk) slots for results to be deterministic. The
// first exception thrown by any chunk is rethrown after all workers join.
void ParallelFor(std::size_t n, int threads, std::size_t chunk,
                 const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace lidarfuse

#endif  // LIDARFUSE_PARALLEL_H_
