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

#include "lidarfuse/pseudo_supervision.h"

#include <charconv>
#include <optional>
#include <string_view>

#include "json.hpp"
#include "lidarfuse/errors.h"
#include "lidarfuse/scene_io.h"
#include "lidarfuse/spatial_index.h"

namespace lidarfuse {

SupervisionResult GenerateTrainingRecords(
    const SceneBundle& scene, std::span<const Surfel> surfels,
    const FusionParams& feature_params,
    const FusionParams& supervision_params, bool fill_features,
    const FusionOptions& options) {
  SupervisionResult result;
  if (supervision_params.delta_t_max > feature_params.delta_t_max) {
    result.warnings.push_back(
        "supervision delta_t_max is looser than the feature pass");
  }
  if (supervision_params.tau > feature_params.tau) {
    result.warnings.push_back(
        "supervision tau is looser than the feature pass");
  }

  FusionOptions shared = options;
  std::optional<SpatialIndex> own_index;
  if (shared.index == nullptr && !scene.points.empty()) {
    own_index.emplace(SpatialIndex::FromPoints(scene.points));
    shared.index = &*own_index;
  }
  const PointLabeling features =
      Fuse(scene, surfels, feature_params, fill_features, shared);
  const PointLabeling supervision =
      Fuse(scene, surfels, supervision_params, /*fill=*/false, shared);
  result.records = ZipRecords(features, supervision);
  return result;
}

std::vector<TrainingRecord> ZipRecords(const PointLabeling& features,
                                       const PointLabeling& supervision) {
  if (features.size() != supervision.size()) {
    throw InvalidArgument("records: labelings differ in size");
  }
  std::vector<TrainingRecord> records(features.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].point_index = static_cast<std::uint32_t>(i);
    records[i].feature_category = features.categories[i];
    records[i].pseudo_label =
        supervision.provenance[i] == Provenance::kDirectVote
            ? supervision.categories[i]
            : kUnlabeled;
  }
  return records;
}

CouplingAudit AuditCoupling(std::span<const TrainingRecord> records) {
  CouplingAudit audit;
  audit.point_count = records.size();
  for (const TrainingRecord& r : records) {
    ++audit.feature_counts[r.feature_category];
    if (r.pseudo_label == kUnlabeled) continue;
    ++audit.supervised;
    ++audit.pseudo_counts[r.pseudo_label];
    audit.agreeing += r.feature_category == r.pseudo_label;
  }
  if (audit.supervised > 0) {
    audit.agreement_rate = static_cast<double>(audit.agreeing) /
                           static_cast<double>(audit.supervised);
  }
  if (audit.point_count > 0) {
    audit.sparsity = static_cast<double>(audit.supervised) /
                     static_cast<double>(audit.point_count);
  }
  return audit;
}

void WriteRecords(const std::string& path,
                  std::span<const TrainingRecord> records) {
  std::string out = "point_index,feature_category,pseudo_label\n";
  out.reserve(out.size() + records.size() * 20);
  for (const TrainingRecord& r : records) {
    out += std::to_string(r.point_index);
    out += ',';
    out += std::to_string(r.feature_category);
    out += ',';
    out += std::to_string(r.pseudo_label);
    out += '\n';
  }
  WriteTextFile(path, out);
}

std::vector<TrainingRecord> ReadRecords(const std::string& path) {
  const std::string text = ReadTextFile(path);
  std::vector<TrainingRecord> records;
  std::size_t pos = 0;
  std::size_t line_number = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (header) {
      if (line != "point_index,feature_category,pseudo_label") {
        throw ParseError(path, line_number, "unexpected header");
      }
      header = false;
      continue;
    }
    if (line.empty()) continue;
    TrainingRecord r;
    const char* p = line.data();
    const char* e = line.data() + line.size();
    auto field = [&](auto* value, bool last) {
      const auto res = std::from_chars(p, e, *value);
      const bool bad_end =
          last ? res.ptr != e : (res.ptr == e || *res.ptr != ',');
      if (res.ec != std::errc() || bad_end) {
        throw ParseError(path, line_number, "malformed record");
      }
      p = res.ptr + 1;
    };
    field(&r.point_index, false);
    field(&r.feature_category, false);
    field(&r.pseudo_label, true);
    records.push_back(r);
  }
  if (header) throw ParseError(path, 1, "empty records file");
  return records;
}

std::string AuditToJson(const CouplingAudit& audit) {
  nlohmann::ordered_json j;
  j["point_count"] = audit.point_count;
  j["supervised"] = audit.supervised;
  j["agreeing"] = audit.agreeing;
  j["agreement_rate"] = audit.agreement_rate
                            ? nlohmann::ordered_json(*audit.agreement_rate)
                            : nlohmann::ordered_json(nullptr);
  j["sparsity"] = audit.sparsity;
  nlohmann::ordered_json features = nlohmann::ordered_json::object();
  for (const auto& [id, n] : audit.feature_counts) {
    features[std::to_string(id)] = n;
  }
  nlohmann::ordered_json pseudo = nlohmann::ordered_json::object();
  for (const auto& [id, n] : audit.pseudo_counts) {
    pseudo[std::to_string(id)] = n;
  }
  j["feature_counts"] = features;
  j["pseudo_counts"] = pseudo;
  return j.dump(2) + "\n";
}

}  // namespace lidarfuse
