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

#include "lidarfuse/surfel_estimation.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "lidarfuse/errors.h"
#include "lidarfuse/parallel.h"

namespace lidarfuse {

namespace {

std::uint64_t SplitMix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Unbiased integer in [0, range) (Lemire's multiply-shift with rejection).
std::uint32_t Bounded(std::uint64_t& state, std::uint32_t range) {
  std::uint64_t m = (SplitMix64(state) >> 32) * range;
  auto low = static_cast<std::uint32_t>(m);
  if (low < range) {
    const std::uint32_t threshold = (0u - range) % range;
    while (low < threshold) {
      m = (SplitMix64(state) >> 32) * range;
      low = static_cast<std::uint32_t>(m);
    }
  }
  return static_cast<std::uint32_t>(m >> 32);
}

// Flips `v` so its first nonzero component in (z, x, y) order is positive.
Eigen::Vector3d CanonicalSign(const Eigen::Vector3d& v) {
  for (int axis : {2, 0, 1}) {
    if (v[axis] > 0.0) return v;
    if (v[axis] < 0.0) return -v;
  }
  return v;
}

Surfel FallbackSurfel(const SurfelEstimationParams& params) {
  Surfel s;
  s.normal = Eigen::Vector3d::UnitZ();
  s.tangent = Eigen::Vector3d::UnitX();
  s.radius_tangent = params.tangent_radius_fraction * params.initial_radius;
  s.radius_bitangent = s.radius_tangent;
  return s;
}

// Returns false when the neighborhood is degenerate.
bool SurfelFromNeighborhood(const Eigen::Vector3d& query,
                            std::span<const LidarPoint> points,
                            std::span<const std::uint32_t> neighbors,
                            double radius,
                            const SurfelEstimationParams& params,
                            Surfel* out) {
  if (neighbors.size() < static_cast<std::size_t>(params.min_neighbors)) {
    return false;
  }
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::uint32_t id : neighbors) {
    const Eigen::Vector3d d = points[id].position - query;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(neighbors.size());

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success) return false;
  // Eigenvalues ascend: column 2 is the first principal axis.
  const Eigen::Vector3d& lambda = solver.eigenvalues();
  const double sigma0 = std::sqrt(std::max(lambda[2], 0.0));
  const double sigma1 = std::sqrt(std::max(lambda[1], 0.0));
  const double floor =
      std::clamp(params.stddev_floor_fraction * radius,
                 params.stddev_floor_min, params.stddev_floor_max);
  if (sigma0 < floor || sigma1 < floor) return false;

  out->normal = CanonicalSign(solver.eigenvectors().col(0).normalized());
  Eigen::Vector3d tangent = solver.eigenvectors().col(2);
  tangent -= tangent.dot(out->normal) * out->normal;
  out->tangent = CanonicalSign(tangent.normalized());
  out->radius_tangent = params.tangent_radius_fraction * radius;
  out->radius_bitangent = std::sqrt(sigma1 / sigma0) * out->radius_tangent;
  return true;
}

}  // namespace

void CheckSurfelParams(const SurfelEstimationParams& p) {
  if (!(p.initial_radius > 0.0) || !(p.initial_radius <= p.max_radius)) {
    throw InvalidArgument("surfel params: need 0 < initial_radius <= max_radius");
  }
  if (p.min_neighbors < 3 || p.max_neighbors < p.min_neighbors) {
    throw InvalidArgument(
        "surfel params: need max_neighbors >= min_neighbors >= 3");
  }
  if (!(p.stddev_floor_min <= p.stddev_floor_max) ||
      !(p.tangent_radius_fraction > 0.0)) {
    throw InvalidArgument("surfel params: invalid floor or radius fraction");
  }
}

std::vector<std::uint32_t> SampleWithoutReplacement(std::uint32_t n,
                                                    std::uint32_t k,
                                                    std::uint64_t seed,
                                                    std::uint64_t stream) {
  k = std::min(k, n);
  std::uint64_t state = seed;
  state = SplitMix64(state) ^ (stream * 0xD1B54A32D192ED03ULL);
  std::vector<std::uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0u);
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint32_t j = i + Bounded(state, n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

SurfelEstimate EstimateSurfelTraced(std::size_t point_index,
                                    std::span<const LidarPoint> points,
                                    const SpatialIndex& index,
                                    const SurfelEstimationParams& params) {
  if (point_index >= points.size()) {
    throw InvalidArgument("surfel estimation: point index out of range");
  }
  SurfelEstimate result;
  const Eigen::Vector3d& query = points[point_index].position;
  std::vector<std::uint32_t> neighbors;
  std::vector<std::uint32_t> thinned;
  double radius = params.initial_radius;
  for (;;) {
    result.radii_tried.push_back(radius);
    index.RadiusQuery(query, radius, &neighbors);
    std::span<const std::uint32_t> used = neighbors;
    if (neighbors.size() > static_cast<std::size_t>(params.max_neighbors)) {
      const auto picks = SampleWithoutReplacement(
          static_cast<std::uint32_t>(neighbors.size()),
          static_cast<std::uint32_t>(params.max_neighbors), params.rng_seed,
          point_index);
      thinned.clear();
      for (std::uint32_t p : picks) thinned.push_back(neighbors[p]);
      used = thinned;
    }
    if (SurfelFromNeighborhood(query, points, used, radius, params,
                               &result.surfel)) {
      return result;
    }
    if (radius >= params.max_radius) break;
    radius = std::min(2.0 * radius, params.max_radius);
  }
  result.surfel = FallbackSurfel(params);
  result.fallback = true;
  return result;
}

Surfel EstimateSurfel(std::size_t point_index,
                      std::span<const LidarPoint> points,
                      const SpatialIndex& index,
                      const SurfelEstimationParams& params) {
  return EstimateSurfelTraced(point_index, points, index, params).surfel;
}

std::vector<Surfel> EstimateAllSurfels(std::span<const LidarPoint> points,
                                       const SpatialIndex& index,
                                       const SurfelEstimationParams& params,
                                       int threads) {
  CheckSurfelParams(params);
  std::vector<Surfel> surfels(points.size());
  ParallelFor(points.size(), threads, 4096,
              [&](std::size_t begin, std::size_t end) {
                for (std::size_t i = begin; i < end; ++i) {
                  surfels[i] = EstimateSurfel(i, points, index, params);
                }
              });
  return surfels;
}

}  // namespace lidarfuse
