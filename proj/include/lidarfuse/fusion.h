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

// Multiview label fusion: filtered point/image correspondences, weighted
// voting and nearest-neighbor fill.
//
// For every camera, the points inside its distance-capped frustum are drawn
// as dilated surfels into a depth image. A point then votes with the label
// under its projection if it passes, in order: the temporal filter
// (|t_cam - t_pt| <= delta_t_max), the edge-on test, the image bounds, the
// relative depth test (|z - depth| / z <= tau) and the unlabeled-pixel test.
// Each vote is weighted by
//
//   w = (1 - d^2 / d_max^2)^2 * (1 - dt^2 / delta_t_max^2)^2
//
// with d the camera-to-point distance and dt the time difference. A point
// takes the category with the largest summed weight.

#ifndef LIDARFUSE_FUSION_H_
#define LIDARFUSE_FUSION_H_

#include <cstdint>
#include <span>
#include <vector>

#include "lidarfuse/kernels/kernels.h"
#include "lidarfuse/scene.h"
#include "lidarfuse/spatial_index.h"

namespace lidarfuse {

struct FusionParams {
  double delta_t_max = 0.1;      // seconds
  double tau = 0.01;             // relative depth tolerance
  double dilation_k = 8.0;       // surfel radius multiplier when rendering
  double d_max = 400.0;          // meters
  double delta_t_thresh = 20.0;  // seconds; rendering cutoff

  // Sparse, trusted pseudo-label pass.
  static FusionParams Supervision();
  // Dense input-feature pass.
  static FusionParams Features();

  bool operator==(const FusionParams&) const = default;
};

// Throws InvalidArgument unless every field is positive, tau < 1,
// dilation_k >= 1 and delta_t_max <= delta_t_thresh.
void CheckFusionParams(const FusionParams& params);

struct Correspondence {
  std::uint32_t point_index = 0;
  std::uint32_t camera_index = 0;
  double weight = 0.0;
  CategoryId voted_category = kUnlabeled;

  bool operator==(const Correspondence&) const = default;
};

enum class Provenance : std::uint8_t {
  kNone = 0,
  kDirectVote = 1,
  kNeighborFill = 2,
};

struct PointLabeling {
  std::vector<CategoryId> categories;
  std::vector<Provenance> provenance;
  std::vector<double> total_weight;         // summed vote weight (diagnostic)
  std::vector<std::uint32_t> vote_count;    // correspondences per point

  std::size_t size() const { return categories.size(); }
  std::size_t CountLabeled() const;
  std::size_t CountDirect() const;

  bool operator==(const PointLabeling&) const = default;
};

// Throws InvalidArgument if the distance or time difference exceeds its
// bound; that can only happen when a caller bypassed the filters.
double VoteWeight(const CameraFrame& camera, const LidarPoint& point,
                  const FusionParams& params);

struct FusionOptions {
  int threads = 1;
  // Optional prebuilt index over scene.points.
  const SpatialIndex* index = nullptr;
  const kernels::KernelSet* kernel_set = nullptr;  // defaults to active
};

// All accepted correspondences sorted by (point_index, camera_index).
std::vector<Correspondence> FindCorrespondences(
    const SceneBundle& scene, std::span<const Surfel> surfels,
    const FusionParams& params, const FusionOptions& options = {});

// Correspondences for one camera, ascending point index.
std::vector<Correspondence> FindCameraCorrespondences(
    const SceneBundle& scene, std::span<const Surfel> surfels,
    std::size_t camera_index, const FusionParams& params,
    const SpatialIndex& index, const kernels::KernelSet& kernel_set);

// Expects correspondences sorted as FindCorrespondences returns them.
// Weights are summed per category in that order; the label is the argmax,
// ties going to the lowest category id. Throws InvalidArgument for voted
// ids >= category_count or point indices >= point_count.
PointLabeling TallyVotes(std::span<const Correspondence> correspondences,
                         std::size_t point_count, std::size_t category_count);

// Gives each unlabeled point the category of its nearest direct-vote point
// (lowest index on distance ties). No-op when nothing was voted.
PointLabeling FillUnlabeled(const PointLabeling& labeling,
                            std::span<const LidarPoint> points,
                            int threads = 1);

// FindCorrespondences -> TallyVotes -> optional FillUnlabeled, streamed
// camera by camera so memory stays bounded. Output is identical for every
// thread count.
PointLabeling Fuse(const SceneBundle& scene, std::span<const Surfel> surfels,
                   const FusionParams& params, bool fill,
                   const FusionOptions& options = {});

}  // namespace lidarfuse

#endif  // LIDARFUSE_FUSION_H_
