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

// On-disk formats. All writers are byte-deterministic.
//
// Scene directory:
//   points.csv        header "x,y,z,t,sensor_id", one point per line, floats
//                     with 17 significant digits (C locale)
//   cameras.json      array of {frame_id, timestamp,
//                     intrinsics{fx,fy,cx,cy,width,height},
//                     camera_from_world: 16 row-major values}
//   taxonomy.json     array of {id, name, is_mover, is_ignore}
//   label_images/NNNNNN.pgm one binary 16-bit PGM (P5, maxval 65535, big-endian)
//                     per camera, NNNNNN = camera position in cameras.json
//
// Per-point label file: first line "count=<N>", then one id per line.

#ifndef LIDARFUSE_SCENE_IO_H_
#define LIDARFUSE_SCENE_IO_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lidarfuse/fusion.h"
#include "lidarfuse/scene.h"
#include "lidarfuse/surfel_estimation.h"

namespace lidarfuse {

inline constexpr char kPointsFile[] = "points.csv";
inline constexpr char kCamerasFile[] = "cameras.json";
inline constexpr char kTaxonomyFile[] = "taxonomy.json";
inline constexpr char kLabelsDir[] = "label_images";

// Throws IoError / ParseError. The result passes ValidateScene; a bundle
// that does not is reported as an Error listing the first violation.
SceneBundle ReadScene(const std::string& directory);
void WriteScene(const SceneBundle& bundle, const std::string& directory);

std::string LabelImagePath(const std::string& directory, std::size_t index);

std::vector<CategoryId> ReadLabels(
    const std::string& path,
    std::optional<std::size_t> expected_count = std::nullopt);
void WriteLabels(const std::string& path, std::span<const CategoryId> labels);

ClassTaxonomy ReadTaxonomy(const std::string& path);
void WriteTaxonomy(const ClassTaxonomy& taxonomy, const std::string& path);

// Raw 16-bit PGM access.
struct Pgm16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> samples;
};
Pgm16 ReadPgm16(const std::string& path);
void WritePgm16(const std::string& path, int width, int height,
                std::span<const std::uint16_t> samples);

// Fusion configuration: {"supervision": {...}, "features": {...},
// "taxonomy": "<path>", "surfels": {...}}. Missing keys take defaults.
struct FusionConfig {
  FusionParams supervision = FusionParams::Supervision();
  FusionParams features = FusionParams::Features();
  bool fill_features = true;
  std::string taxonomy_path;
  SurfelEstimationParams surfels;
};
FusionConfig ReadFusionConfig(const std::string& path);
void WriteFusionConfig(const FusionConfig& config, const std::string& path);

// Surfel dump, header "nx,ny,nz,tx,ty,tz,r1,r2".
void WriteSurfels(const std::string& path, std::span<const Surfel> surfels);
std::vector<Surfel> ReadSurfels(const std::string& path);

// Lossless, locale-independent shortest round-trip formatting at 17
// significant digits.
std::string FormatDouble(double value);

// Atomically-ish writes `contents` to `path` (whole-file write).
void WriteTextFile(const std::string& path, const std::string& contents);
std::string ReadTextFile(const std::string& path);

}  // namespace lidarfuse

#endif  // LIDARFUSE_SCENE_IO_H_
