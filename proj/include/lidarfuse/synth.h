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

// Seeded synthetic scenes with exact per-point ground truth.
//
// A scene is a small analytic world (ground plane, boxes, vertical
// cylinders) observed by a rig that carries a spinning range-limited lidar
// and one or more pinhole cameras. Lidar points are ray hits; label images
// are per-pixel ray casts at the camera time, optionally corrupted the way
// 2D segmentation tends to fail:
//
//   mover_aliasing   A box parked ahead of the rig, outside lidar range,
//                    departs at `object_speed` before the rig gets close.
//                    Images show the box over road that the lidar only
//                    scans later, once the box is gone.
//   occlusion_bleed  A pole in front of a wall; the pole mask in every label
//                    image is dilated by `bleed_width_px`.
//   fence            A fence of vertical slats in front of a wall; label
//                    images mark the whole fence rectangle as fence.
//
// World axes: x right, y forward, z up. Cameras look along +y rotated by
// their yaw offset.

#ifndef LIDARFUSE_SYNTH_H_
#define LIDARFUSE_SYNTH_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lidarfuse/scene.h"

namespace lidarfuse {

enum class Scenario { kMoverAliasing, kOcclusionBleed, kFence };

std::string ScenarioName(Scenario scenario);
// Throws InvalidArgument for an unknown name.
Scenario ParseScenario(const std::string& name);

// Categories used by every synthetic scene.
inline constexpr CategoryId kSynthRoad = 0;
inline constexpr CategoryId kSynthBuilding = 1;
inline constexpr CategoryId kSynthVehicle = 2;  // mover
inline constexpr CategoryId kSynthPole = 3;
inline constexpr CategoryId kSynthFence = 4;
inline constexpr CategoryId kSynthVegetation = 5;
ClassTaxonomy SynthTaxonomy();

struct SynthConfig {
  Scenario scenario = Scenario::kMoverAliasing;
  std::uint64_t rng_seed = 7;

  // Scenario knobs.
  double object_speed = 20.0;        // m/s, mover after departure
  double object_depart_time = 2.0;   // s
  int bleed_width_px = 3;
  double fence_fill_fraction = 0.4;  // slat width / slat pitch

  // Rig motion.
  double ego_speed = 8.0;  // m/s along +y

  // Cameras. Frames are taken at camera_time_offset + k / camera_rate_hz.
  int camera_frames = 12;
  double camera_rate_hz = 2.0;
  double camera_time_offset = 0.05;
  std::vector<double> camera_yaws_deg = {0.0};  // one camera per yaw
  int image_width = 320;
  int image_height = 240;
  double focal_px = 277.0;
  double camera_height = 1.6;

  // Lidar. Sweeps at k / lidar_rate_hz covering the camera time span.
  double lidar_rate_hz = 10.0;
  double lidar_height = 1.8;
  double lidar_range = 35.0;
  double azimuth_step_deg = 1.0;       // point density knob
  double azimuth_half_fov_deg = 180.0;
  double elevation_min_deg = -15.0;
  double elevation_max_deg = 5.0;
  double elevation_step_deg = 1.0;
  std::size_t max_points = 0;  // truncate when nonzero

  // Defaults tuned per scenario.
  static SynthConfig Default(Scenario scenario);
  // Mover scene scaled to 3,000,000 points and 60 images.
  static SynthConfig Performance();
};

// Throws InvalidArgument when rates, densities or sizes are not positive.
void CheckSynthConfig(const SynthConfig& config);

struct SynthScene {
  Scenario scenario = Scenario::kMoverAliasing;
  SceneBundle bundle;
  std::vector<CategoryId> ground_truth;  // per point
  // Per point: 1 when some label image puts the scenario's intruder
  // category (mover, pole or fence) on this point although the point is
  // not of that category.
  std::vector<std::uint8_t> in_conflict_region;
  CategoryId intruder = kSynthVehicle;
};

SynthScene Generate(const SynthConfig& config);

struct ScenarioReport {
  std::string scenario;
  std::size_t points = 0;
  std::size_t labeled = 0;
  std::size_t errors = 0;  // labeled and != ground truth
  std::size_t region_points = 0;
  std::size_t region_errors = 0;  // region points labeled as the intruder
  std::map<CategoryId, std::size_t> region_errors_by_truth;

  std::optional<double> Precision() const;
  // Region errors whose true category is road (road labeled as mover etc).
  std::size_t RoadRegionErrors() const;
};

// Throws InvalidArgument when `labels` does not match the point count.
ScenarioReport MakeScenarioReport(const SynthScene& scene,
                                  std::span<const CategoryId> labels);

std::string ScenarioReportToJson(const ScenarioReport& report);

}  // namespace lidarfuse

#endif  // LIDARFUSE_SYNTH_H_
