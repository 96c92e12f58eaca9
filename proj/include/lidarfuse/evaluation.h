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

// Per-point semantic evaluation: confusion counts, IoU and mIoU.

#ifndef LIDARFUSE_EVALUATION_H_
#define LIDARFUSE_EVALUATION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lidarfuse/scene.h"

namespace lidarfuse {

// Rows are ground-truth ids in [0, category_count), columns are predicted
// ids plus one trailing column for predictions outside the taxonomy
// (including the sentinel). Those count as misses for their row and as false
// positives for nobody.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t category_count);

  std::size_t category_count() const { return category_count_; }
  std::uint64_t At(std::size_t gt, std::size_t pred) const {
    return counts_[gt * (category_count_ + 1) + pred];
  }
  std::uint64_t Unmatched(std::size_t gt) const {
    return At(gt, category_count_);
  }
  void Add(std::size_t gt, std::size_t pred, std::uint64_t n = 1);
  void AddUnmatched(std::size_t gt, std::uint64_t n = 1);

  // Points counted in the matrix.
  std::uint64_t evaluated() const { return evaluated_; }
  // Every point presented, including skipped sentinel / ignore gt.
  std::uint64_t total() const { return total_; }
  void AddSkipped(std::uint64_t n) { total_ += n; }

  std::uint64_t TruePositives(std::size_t c) const { return At(c, c); }
  std::uint64_t FalsePositives(std::size_t c) const;
  std::uint64_t FalseNegatives(std::size_t c) const;
  std::uint64_t RowTotal(std::size_t c) const;

  // Elementwise sum; throws InvalidArgument on a size mismatch.
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t category_count_ = 0;
  std::vector<std::uint64_t> counts_;
  std::uint64_t evaluated_ = 0;
  std::uint64_t total_ = 0;
};

// Counts every point whose gt is a taxonomy category without the ignore
// flag. Throws InvalidArgument on a length mismatch.
ConfusionMatrix Accumulate(std::span<const CategoryId> predicted,
                           std::span<const CategoryId> ground_truth,
                           const ClassTaxonomy& taxonomy);

// TP / (TP + FP + FN) per category id; absent when the denominator is 0.
std::vector<std::optional<double>> IouPerCategory(const ConfusionMatrix& cm);

// Number of points per category id in `ground_truth` (sentinel dropped).
std::vector<std::uint64_t> CategoryCounts(
    std::span<const CategoryId> ground_truth, std::size_t category_count);

// Categories with at least `min_points` points in at least `min_scenes`
// scenes. per_scene[s][c] is the count of category c in scene s.
std::set<CategoryId> IncludedCategories(
    std::span<const std::vector<std::uint64_t>> per_scene,
    std::uint64_t min_points = 1000, std::size_t min_scenes = 3);

struct EvaluationReport {
  std::optional<double> miou;        // over included categories with an IoU
  std::optional<double> mover_miou;  // same, mover categories only
  std::map<CategoryId, std::optional<double>> per_category;  // included only
  double coverage = 0.0;  // points with an included gt / all points
  std::uint64_t evaluated_points = 0;
  std::uint64_t total_points = 0;
};

// Throws InvalidArgument when `included` is empty.
EvaluationReport Summarize(const ConfusionMatrix& cm,
                           const std::set<CategoryId>& included,
                           const ClassTaxonomy& taxonomy);

std::string ReportToJson(const EvaluationReport& report,
                         const ClassTaxonomy& taxonomy);
std::string ReportToText(const EvaluationReport& report,
                         const ClassTaxonomy& taxonomy);

}  // namespace lidarfuse

#endif  // LIDARFUSE_EVALUATION_H_
