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

// Decoupled training records: a dense feature labeling and a sparse trusted
// pseudo-label labeling, produced by two independent fusion passes.

#ifndef LIDARFUSE_PSEUDO_SUPERVISION_H_
#define LIDARFUSE_PSEUDO_SUPERVISION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lidarfuse/fusion.h"
#include "lidarfuse/scene.h"

namespace lidarfuse {

struct TrainingRecord {
  std::uint32_t point_index = 0;
  CategoryId feature_category = kUnlabeled;
  CategoryId pseudo_label = kUnlabeled;  // direct votes only

  bool operator==(const TrainingRecord&) const = default;
};

struct SupervisionResult {
  std::vector<TrainingRecord> records;
  // Non-empty when the supervision pass is looser than the feature pass in
  // delta_t_max or tau. Informational; records are still produced.
  std::vector<std::string> warnings;
};

// Feature labels come from Fuse(feature_params, fill = fill_features); pseudo
// labels from Fuse(supervision_params, fill = false), keeping only
// direct-vote points. One record per point, in point order.
SupervisionResult GenerateTrainingRecords(
    const SceneBundle& scene, std::span<const Surfel> surfels,
    const FusionParams& feature_params,
    const FusionParams& supervision_params, bool fill_features = true,
    const FusionOptions& options = {});

// Assembles records from two existing labelings.
std::vector<TrainingRecord> ZipRecords(const PointLabeling& features,
                                       const PointLabeling& supervision);

struct CouplingAudit {
  std::size_t point_count = 0;
  std::size_t supervised = 0;  // pseudo_label != sentinel
  std::size_t agreeing = 0;    // supervised and feature == pseudo
  std::optional<double> agreement_rate;  // absent when nothing is supervised
  double sparsity = 0.0;                 // supervised / point_count
  std::map<CategoryId, std::size_t> feature_counts;
  std::map<CategoryId, std::size_t> pseudo_counts;  // sentinel excluded
};

CouplingAudit AuditCoupling(std::span<const TrainingRecord> records);

// Records CSV, header "point_index,feature_category,pseudo_label".
void WriteRecords(const std::string& path,
                  std::span<const TrainingRecord> records);
std::vector<TrainingRecord> ReadRecords(const std::string& path);

std::string AuditToJson(const CouplingAudit& audit);

}  // namespace lidarfuse

#endif  // LIDARFUSE_PSEUDO_SUPERVISION_H_
