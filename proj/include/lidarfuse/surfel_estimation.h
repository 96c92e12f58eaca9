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

#ifndef LIDARFUSE_SURFEL_ESTIMATION_H_
#define LIDARFUSE_SURFEL_ESTIMATION_H_

#include <cstdint>
#include <span>
#include <vector>

#include "lidarfuse/scene.h"
#include "lidarfuse/spatial_index.h"

namespace lidarfuse {

// Growing-neighborhood PCA surfel estimation.
//
// Starting at `initial_radius`, the neighborhood of a point is gathered,
// randomly thinned to `max_neighbors`, and decomposed by PCA about the point
// itself. A decomposition is degenerate when it has fewer than
// `min_neighbors` samples or when either of its two leading principal
// standard deviations falls below
//   clamp(stddev_floor_fraction * radius, stddev_floor_min, stddev_floor_max).
// Degenerate neighborhoods double the radius until `max_radius`; past that the
// point falls back to a world-up normal.
struct SurfelEstimationParams {
  double initial_radius = 0.25;
  double max_radius = 2.0;
  int max_neighbors = 32;
  int min_neighbors = 3;
  double stddev_floor_fraction = 0.10;
  double stddev_floor_min = 0.0025;
  double stddev_floor_max = 0.01;
  double tangent_radius_fraction = 0.25;
  std::uint64_t rng_seed = 0;
};

// Throws InvalidArgument when the parameter invariants do not hold.
void CheckSurfelParams(const SurfelEstimationParams& params);

// Result of one estimation plus the radius schedule it walked through.
struct SurfelEstimate {
  Surfel surfel;
  std::vector<double> radii_tried;  // in order; last is the final radius
  bool fallback = false;            // no nondegenerate neighborhood found
};

SurfelEstimate EstimateSurfelTraced(std::size_t point_index,
                                    std::span<const LidarPoint> points,
                                    const SpatialIndex& index,
                                    const SurfelEstimationParams& params);

Surfel EstimateSurfel(std::size_t point_index,
                      std::span<const LidarPoint> points,
                      const SpatialIndex& index,
                      const SurfelEstimationParams& params);

// Element i equals EstimateSurfel(i, ...). Output is identical for every
// thread count.
std::vector<Surfel> EstimateAllSurfels(std::span<const LidarPoint> points,
                                       const SpatialIndex& index,
                                       const SurfelEstimationParams& params,
                                       int threads = 1);

// Deterministic sample of `k` distinct positions out of [0, n), keyed by
// (seed, stream). Returned ascending.
std::vector<std::uint32_t> SampleWithoutReplacement(std::uint32_t n,
                                                    std::uint32_t k,
                                                    std::uint64_t seed,
                                                    std::uint64_t stream);

}  // namespace lidarfuse

#endif  // LIDARFUSE_SURFEL_ESTIMATION_H_
