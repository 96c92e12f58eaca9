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

#include "lidarfuse/evaluation.h"

#include <algorithm>
#include <cstdio>

#include "json.hpp"
#include "lidarfuse/errors.h"

namespace lidarfuse {

ConfusionMatrix::ConfusionMatrix(std::size_t category_count)
    : category_count_(category_count),
      counts_(category_count * (category_count + 1), 0) {}

void ConfusionMatrix::Add(std::size_t gt, std::size_t pred, std::uint64_t n) {
  counts_[gt * (category_count_ + 1) + pred] += n;
  evaluated_ += n;
  total_ += n;
}

void ConfusionMatrix::AddUnmatched(std::size_t gt, std::uint64_t n) {
  Add(gt, category_count_, n);
}

std::uint64_t ConfusionMatrix::FalsePositives(std::size_t c) const {
  std::uint64_t fp = 0;
  for (std::size_t g = 0; g < category_count_; ++g) {
    if (g != c) fp += At(g, c);
  }
  return fp;
}

std::uint64_t ConfusionMatrix::RowTotal(std::size_t c) const {
  std::uint64_t n = 0;
  for (std::size_t p = 0; p <= category_count_; ++p) n += At(c, p);
  return n;
}

std::uint64_t ConfusionMatrix::FalseNegatives(std::size_t c) const {
  return RowTotal(c) - At(c, c);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.category_count_ != category_count_) {
    throw InvalidArgument("confusion matrices differ in size");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i] += other.counts_[i];
  }
  evaluated_ += other.evaluated_;
  total_ += other.total_;
  return *this;
}

ConfusionMatrix Accumulate(std::span<const CategoryId> predicted,
                           std::span<const CategoryId> ground_truth,
                           const ClassTaxonomy& taxonomy) {
  if (predicted.size() != ground_truth.size()) {
    throw InvalidArgument("evaluation: prediction has " +
                          std::to_string(predicted.size()) +
                          " labels, ground truth " +
                          std::to_string(ground_truth.size()));
  }
  const std::size_t n = taxonomy.IdBound();
  // Lookup tables: evaluated gt ids and valid prediction ids.
  std::vector<std::uint8_t> evaluated(n, 0), known(n, 0);
  for (const TaxonomyEntry& e : taxonomy.entries()) {
    known[e.id] = 1;
    evaluated[e.id] = !e.is_ignore;
  }
  ConfusionMatrix cm(n);
  std::uint64_t skipped = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const CategoryId g = ground_truth[i];
    if (g >= n || !evaluated[g]) {
      ++skipped;
      continue;
    }
    const CategoryId p = predicted[i];
    if (p < n && known[p]) {
      cm.Add(g, p);
    } else {
      cm.AddUnmatched(g);
    }
  }
  cm.AddSkipped(skipped);
  return cm;
}

std::vector<std::optional<double>> IouPerCategory(const ConfusionMatrix& cm) {
  std::vector<std::optional<double>> iou(cm.category_count());
  for (std::size_t c = 0; c < iou.size(); ++c) {
    const std::uint64_t tp = cm.TruePositives(c);
    const std::uint64_t denom =
        tp + cm.FalsePositives(c) + cm.FalseNegatives(c);
    if (denom > 0) {
      iou[c] = static_cast<double>(tp) / static_cast<double>(denom);
    }
  }
  return iou;
}

std::vector<std::uint64_t> CategoryCounts(
    std::span<const CategoryId> ground_truth, std::size_t category_count) {
  std::vector<std::uint64_t> counts(category_count, 0);
  for (CategoryId g : ground_truth) {
    if (g < category_count) ++counts[g];
  }
  return counts;
}

std::set<CategoryId> IncludedCategories(
    std::span<const std::vector<std::uint64_t>> per_scene,
    std::uint64_t min_points, std::size_t min_scenes) {
  std::size_t width = 0;
  for (const auto& scene : per_scene) width = std::max(width, scene.size());
  std::set<CategoryId> included;
  for (std::size_t c = 0; c < width && c < kUnlabeled; ++c) {
    std::size_t qualifying = 0;
    for (const auto& scene : per_scene) {
      qualifying += c < scene.size() && scene[c] >= min_points;
    }
    if (qualifying >= min_scenes) included.insert(static_cast<CategoryId>(c));
  }
  return included;
}

EvaluationReport Summarize(const ConfusionMatrix& cm,
                           const std::set<CategoryId>& included,
                           const ClassTaxonomy& taxonomy) {
  if (included.empty()) {
    throw InvalidArgument("evaluation: no category meets the inclusion rule");
  }
  const auto iou = IouPerCategory(cm);
  EvaluationReport report;
  report.total_points = cm.total();
  double sum = 0.0, mover_sum = 0.0;
  std::size_t defined = 0, mover_defined = 0;
  for (CategoryId c : included) {
    std::optional<double> value;
    if (c < iou.size()) {
      value = iou[c];
      report.evaluated_points += cm.RowTotal(c);
    }
    report.per_category[c] = value;
    if (!value) continue;
    sum += *value;
    ++defined;
    const TaxonomyEntry* entry = taxonomy.Find(c);
    if (entry != nullptr && entry->is_mover) {
      mover_sum += *value;
      ++mover_defined;
    }
  }
  if (defined > 0) report.miou = sum / static_cast<double>(defined);
  if (mover_defined > 0) {
    report.mover_miou = mover_sum / static_cast<double>(mover_defined);
  }
  if (report.total_points > 0) {
    report.coverage = static_cast<double>(report.evaluated_points) /
                      static_cast<double>(report.total_points);
  }
  return report;
}

namespace {

std::string CategoryName(const ClassTaxonomy& taxonomy, CategoryId id) {
  const TaxonomyEntry* e = taxonomy.Find(id);
  return e ? e->name : std::to_string(id);
}

nlohmann::ordered_json Optional(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string FormatOptional(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *v);
  return buf;
}

}  // namespace

std::string ReportToJson(const EvaluationReport& report,
                         const ClassTaxonomy& taxonomy) {
  nlohmann::ordered_json j;
  j["miou"] = Optional(report.miou);
  j["mover_miou"] = Optional(report.mover_miou);
  j["coverage"] = report.coverage;
  j["evaluated_points"] = report.evaluated_points;
  j["total_points"] = report.total_points;
  nlohmann::ordered_json cats = nlohmann::ordered_json::array();
  for (const auto& [id, value] : report.per_category) {
    cats.push_back({{"id", id},
                    {"name", CategoryName(taxonomy, id)},
                    {"iou", Optional(value)}});
  }
  j["categories"] = cats;
  return j.dump(2) + "\n";
}

std::string ReportToText(const EvaluationReport& report,
                         const ClassTaxonomy& taxonomy) {
  std::size_t width = 8;
  for (const auto& [id, value] : report.per_category) {
    width = std::max(width, CategoryName(taxonomy, id).size());
  }
  std::string out;
  char line[256];
  for (const auto& [id, value] : report.per_category) {
    std::snprintf(line, sizeof(line), "%-*s  %5u  %s\n",
                  static_cast<int>(width), CategoryName(taxonomy, id).c_str(),
                  static_cast<unsigned>(id), FormatOptional(value).c_str());
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-*s         %s\n%-*s         %s\n",
                static_cast<int>(width), "mIoU",
                FormatOptional(report.miou).c_str(), static_cast<int>(width),
                "mover", FormatOptional(report.mover_miou).c_str());
  out += line;
  std::snprintf(line, sizeof(line), "%-*s         %.4f (%llu / %llu)\n",
                static_cast<int>(width), "coverage", report.coverage,
                static_cast<unsigned long long>(report.evaluated_points),
                static_cast<unsigned long long>(report.total_points));
  out += line;
  return out;
}

}  // namespace lidarfuse
