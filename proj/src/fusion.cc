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

#include "lidarfuse/fusion.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "lidarfuse/camera.h"
#include "lidarfuse/depth_render.h"
#include "lidarfuse/errors.h"
#include "lidarfuse/parallel.h"

namespace lidarfuse {

namespace {

// Per-point running sums of vote weight by category. Two categories are
// stored inline; points seen under more labels spill into a side table.
// Categories keep first-seen order, and every sum is accumulated in the
// order votes arrive, so results depend only on that order.
class VoteAccumulator {
 public:
  explicit VoteAccumulator(std::size_t point_count) : slots_(point_count) {}

  void Add(std::uint32_t point, CategoryId category, double weight) {
    Slot& s = slots_[point];
    s.total += weight;
    ++s.votes;
    for (int i = 0; i < s.inline_count; ++i) {
      if (s.category[i] == category) {
        s.weight[i] += weight;
        return;
      }
    }
    if (s.inline_count < kInline) {
      s.category[s.inline_count] = category;
      s.weight[s.inline_count] = weight;
      ++s.inline_count;
      return;
    }
    if (s.overflow < 0) {
      s.overflow = static_cast<std::int32_t>(overflow_.size());
      overflow_.emplace_back();
    }
    auto& extra = overflow_[s.overflow];
    for (auto& [cat, w] : extra) {
      if (cat == category) {
        w += weight;
        return;
      }
    }
    extra.emplace_back(category, weight);
  }

  // Argmax with ties to the lowest category id.
  PointLabeling Finish() const {
    PointLabeling out;
    const std::size_t n = slots_.size();
    out.categories.assign(n, kUnlabeled);
    out.provenance.assign(n, Provenance::kNone);
    out.total_weight.assign(n, 0.0);
    out.vote_count.assign(n, 0);
    for (std::size_t p = 0; p < n; ++p) {
      const Slot& s = slots_[p];
      if (s.votes == 0) continue;
      CategoryId best = kUnlabeled;
      double best_weight = -1.0;
      auto consider = [&](CategoryId c, double w) {
        if (w > best_weight || (w == best_weight && c < best)) {
          best = c;
          best_weight = w;
        }
      };
      for (int i = 0; i < s.inline_count; ++i) {
        consider(s.category[i], s.weight[i]);
      }
      if (s.overflow >= 0) {
        for (const auto& [c, w] : overflow_[s.overflow]) consider(c, w);
      }
      out.categories[p] = best;
      out.provenance[p] = Provenance::kDirectVote;
      out.total_weight[p] = s.total;
      out.vote_count[p] = s.votes;
    }
    return out;
  }

 private:
  static constexpr int kInline = 2;
  struct Slot {
    double weight[kInline] = {0.0, 0.0};
    double total = 0.0;
    std::uint32_t votes = 0;
    std::int32_t overflow = -1;
    CategoryId category[kInline] = {kUnlabeled, kUnlabeled};
    std::uint8_t inline_count = 0;
  };

  std::vector<Slot> slots_;
  std::vector<std::vector<std::pair<CategoryId, double>>> overflow_;
};

void CheckInputs(const SceneBundle& scene, std::span<const Surfel> surfels) {
  if (surfels.size() != scene.points.size()) {
    throw InvalidArgument("surfel count " + std::to_string(surfels.size()) +
                          " does not match point count " +
                          std::to_string(scene.points.size()));
  }
  if (scene.cameras.size() != scene.label_images.size()) {
    throw InvalidArgument("camera/label count mismatch");
  }
  if (scene.points.size() > 0xffffffffu || scene.cameras.size() > 0xffffffffu) {
    throw InvalidArgument("scene too large for 32-bit indices");
  }
}

// Runs `consume(camera_index, correspondences)` for every camera in
// ascending order. Cameras are evaluated in parallel blocks; consumption is
// sequential.
template <typename Consume>
void ForEachCamera(const SceneBundle& scene, std::span<const Surfel> surfels,
                   const FusionParams& params, const FusionOptions& options,
                   Consume consume) {
  CheckFusionParams(params);
  CheckInputs(scene, surfels);
  const std::size_t camera_count = scene.cameras.size();
  if (camera_count == 0 || scene.points.empty()) return;

  std::optional<SpatialIndex> own_index;
  const SpatialIndex* index = options.index;
  if (index == nullptr) {
    own_index.emplace(SpatialIndex::FromPoints(scene.points));
    index = &*own_index;
  }
  const kernels::KernelSet& kernel_set =
      options.kernel_set ? *options.kernel_set : kernels::ActiveKernels();

  const int threads = std::max(1, options.threads);
  const std::size_t block = static_cast<std::size_t>(threads);
  std::vector<std::vector<Correspondence>> pending(block);
  for (std::size_t first = 0; first < camera_count; first += block) {
    const std::size_t count = std::min(block, camera_count - first);
    ParallelFor(count, threads, 1, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        pending[i] = FindCameraCorrespondences(scene, surfels, first + i,
                                               params, *index, kernel_set);
      }
    });
    for (std::size_t i = 0; i < count; ++i) {
      consume(first + i, pending[i]);
      std::vector<Correspondence>().swap(pending[i]);
    }
  }
}

}  // namespace

FusionParams FusionParams::Supervision() { return FusionParams{}; }

FusionParams FusionParams::Features() {
  FusionParams p;
  p.delta_t_max = 10.0;
  p.tau = 0.05;
  p.dilation_k = 2.0;
  return p;
}

void CheckFusionParams(const FusionParams& p) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(p.delta_t_max) || !positive(p.tau) || !positive(p.d_max) ||
      !positive(p.delta_t_thresh) || !std::isfinite(p.dilation_k)) {
    throw InvalidArgument("fusion parameters must be finite and positive");
  }
  if (!(p.tau < 1.0)) throw InvalidArgument("tau must be in (0, 1)");
  if (!(p.dilation_k >= 1.0)) throw InvalidArgument("dilation_k must be >= 1");
  if (!(p.delta_t_max <= p.delta_t_thresh)) {
    throw InvalidArgument("delta_t_max must not exceed delta_t_thresh");
  }
}

std::size_t PointLabeling::CountLabeled() const {
  return static_cast<std::size_t>(
      std::count_if(categories.begin(), categories.end(),
                    [](CategoryId c) { return c != kUnlabeled; }));
}

std::size_t PointLabeling::CountDirect() const {
  return static_cast<std::size_t>(
      std::count(provenance.begin(), provenance.end(),
                 Provenance::kDirectVote));
}

double VoteWeight(const CameraFrame& camera, const LidarPoint& point,
                  const FusionParams& params) {
  const double d2 = (camera.Center() - point.position).squaredNorm();
  const double dt = camera.timestamp - point.timestamp;
  const double d_max2 = params.d_max * params.d_max;
  const double dt_max2 = params.delta_t_max * params.delta_t_max;
  if (!(d2 <= d_max2)) {
    throw InvalidArgument("vote weight: point beyond d_max");
  }
  if (!(std::abs(dt) <= params.delta_t_max)) {
    throw InvalidArgument("vote weight: time difference beyond delta_t_max");
  }
  const double a = 1.0 - d2 / d_max2;
  const double b = 1.0 - (dt * dt) / dt_max2;
  return (a * a) * (b * b);
}

std::vector<Correspondence> FindCameraCorrespondences(
    const SceneBundle& scene, std::span<const Surfel> surfels,
    std::size_t camera_index, const FusionParams& params,
    const SpatialIndex& index, const kernels::KernelSet& kernel_set) {
  const CameraFrame& camera = scene.cameras[camera_index];
  const LabelImage& labels = scene.label_images[camera_index];
  const std::span<const LidarPoint> points(scene.points);

  const std::vector<std::uint32_t> candidates =
      FrustumSelect(camera, params.d_max, index, points, kernel_set);
  const DepthImage depth =
      RenderDepthImage(camera, candidates, points, surfels, params.dilation_k,
                       params.delta_t_thresh, kernel_set);
  const Eigen::Vector3d center = camera.Center();

  std::vector<Correspondence> out;
  for (std::uint32_t j : candidates) {
    const LidarPoint& pt = points[j];
    if (std::abs(camera.timestamp - pt.timestamp) > params.delta_t_max) {
      continue;
    }
    if (IsBackfacingFrom(center, pt.position, surfels[j])) continue;
    const std::optional<Projection> proj = Project(camera, pt.position);
    if (!proj) continue;
    const int col = static_cast<int>(std::floor(proj->u));
    const int row = static_cast<int>(std::floor(proj->v));
    const double rendered = depth.At(row, col);
    // Written so an empty (+inf) pixel also fails.
    if (!(std::abs(proj->depth - rendered) / proj->depth <= params.tau)) {
      continue;
    }
    const CategoryId category = labels.At(row, col);
    if (category == kUnlabeled) continue;
    const double w = VoteWeight(camera, pt, params);
    if (!(w > 0.0)) continue;
    out.push_back(Correspondence{j, static_cast<std::uint32_t>(camera_index),
                                 w, category});
  }
  return out;
}

std::vector<Correspondence> FindCorrespondences(
    const SceneBundle& scene, std::span<const Surfel> surfels,
    const FusionParams& params, const FusionOptions& options) {
  std::vector<Correspondence> all;
  ForEachCamera(scene, surfels, params, options,
                [&](std::size_t, const std::vector<Correspondence>& c) {
                  all.insert(all.end(), c.begin(), c.end());
                });
  std::stable_sort(all.begin(), all.end(),
                   [](const Correspondence& a, const Correspondence& b) {
                     return a.point_index < b.point_index;
                   });
  return all;
}

PointLabeling TallyVotes(std::span<const Correspondence> correspondences,
                         std::size_t point_count,
                         std::size_t category_count) {
  VoteAccumulator acc(point_count);
  for (const Correspondence& c : correspondences) {
    if (c.point_index >= point_count) {
      throw InvalidArgument("tally: point index out of range");
    }
    if (c.voted_category >= category_count || c.voted_category == kUnlabeled) {
      throw InvalidArgument("tally: category id out of range");
    }
    acc.Add(c.point_index, c.voted_category, c.weight);
  }
  return acc.Finish();
}

PointLabeling FillUnlabeled(const PointLabeling& labeling,
                            std::span<const LidarPoint> points, int threads) {
  if (labeling.size() != points.size()) {
    throw InvalidArgument("fill: labeling size does not match point count");
  }
  PointLabeling out = labeling;
  std::vector<Eigen::Vector3d> positions;
  std::vector<std::uint32_t> ids;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (labeling.provenance[i] == Provenance::kDirectVote) {
      positions.push_back(points[i].position);
      ids.push_back(static_cast<std::uint32_t>(i));
    }
  }
  if (ids.empty() || ids.size() == points.size()) return out;

  const SpatialIndex labeled(positions, ids);
  ParallelFor(points.size(), threads, 8192,
              [&](std::size_t begin, std::size_t end) {
                for (std::size_t i = begin; i < end; ++i) {
                  if (labeling.provenance[i] == Provenance::kDirectVote) {
                    continue;
                  }
                  const std::uint32_t src = labeled.Nearest(points[i].position);
                  out.categories[i] = labeling.categories[src];
                  out.provenance[i] = Provenance::kNeighborFill;
                }
              });
  return out;
}

PointLabeling Fuse(const SceneBundle& scene, std::span<const Surfel> surfels,
                   const FusionParams& params, bool fill,
                   const FusionOptions& options) {
  VoteAccumulator acc(scene.points.size());
  ForEachCamera(scene, surfels, params, options,
                [&](std::size_t, const std::vector<Correspondence>& corrs) {
                  for (const Correspondence& c : corrs) {
                    acc.Add(c.point_index, c.voted_category, c.weight);
                  }
                });
  PointLabeling labeling = acc.Finish();
  if (fill) labeling = FillUnlabeled(labeling, scene.points, options.threads);
  return labeling;
}

}  // namespace lidarfuse
