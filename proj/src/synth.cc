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

#include "lidarfuse/synth.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "lidarfuse/camera.h"
#include "lidarfuse/errors.h"

namespace lidarfuse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegree = std::numbers::pi / 180.0;
constexpr double kHitEpsilon = 1e-9;

// Which observer a primitive is visible to.
enum Visibility : std::uint8_t {
  kLidar = 1,   // physical geometry, hit by lidar rays
  kLabels = 2,  // drawn into label images
  kTruth = 4,   // drawn into the uncorrupted reference labeling
  kAll = kLidar | kLabels | kTruth,
};

struct Hit {
  double t = kInf;
  CategoryId category = kUnlabeled;
};

// Axis-aligned box, static until `depart_time`, then moving at `velocity`.
struct MovingBox {
  Eigen::Vector3d min;
  Eigen::Vector3d max;
  CategoryId category;
  std::uint8_t visibility = kAll;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  double depart_time = 0.0;

  Eigen::Vector3d Offset(double t) const {
    return velocity * std::max(0.0, t - depart_time);
  }
};

struct VerticalCylinder {
  double x, y, radius, z0, z1;
  CategoryId category;
};

bool IntersectBox(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi,
                  const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                  double* t_hit) {
  double t0 = -kInf, t1 = kInf;
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < lo[a] || o[a] > hi[a]) return false;
      continue;
    }
    double ta = (lo[a] - o[a]) / d[a];
    double tb = (hi[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 > t1 || t1 <= kHitEpsilon) return false;
  *t_hit = t0 > kHitEpsilon ? t0 : t1;
  return true;
}

bool IntersectCylinder(const VerticalCylinder& c, const Eigen::Vector3d& o,
                       const Eigen::Vector3d& d, double* t_hit) {
  double best = kInf;
  const double ox = o.x() - c.x, oy = o.y() - c.y;
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 0.0) {
    const double b = 2.0 * (ox * d.x() + oy * d.y());
    const double cc = ox * ox + oy * oy - c.radius * c.radius;
    const double disc = b * b - 4.0 * a * cc;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      for (double t : {(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)}) {
        const double z = o.z() + t * d.z();
        if (t > kHitEpsilon && z >= c.z0 && z <= c.z1) {
          best = std::min(best, t);
          break;
        }
      }
    }
  }
  if (d.z() != 0.0) {
    const double t = (c.z1 - o.z()) / d.z();
    const double x = ox + t * d.x(), y = oy + t * d.y();
    if (t > kHitEpsilon && x * x + y * y <= c.radius * c.radius) {
      best = std::min(best, t);
    }
  }
  if (best == kInf) return false;
  *t_hit = best;
  return true;
}

struct World {
  double ground_extent = 400.0;
  std::vector<MovingBox> boxes;
  std::vector<VerticalCylinder> cylinders;

  Hit Cast(const Eigen::Vector3d& o, const Eigen::Vector3d& d, double time,
           Visibility observer) const {
    Hit hit;
    if (d.z() < 0.0) {
      const double t = -o.z() / d.z();
      const Eigen::Vector3d p = o + t * d;
      if (t > kHitEpsilon && std::abs(p.x()) <= ground_extent &&
          std::abs(p.y()) <= ground_extent) {
        hit = {t, kSynthRoad};
      }
    }
    for (const MovingBox& b : boxes) {
      if (!(b.visibility & observer)) continue;
      const Eigen::Vector3d off = b.Offset(time);
      double t;
      if (IntersectBox(b.min + off, b.max + off, o, d, &t) && t < hit.t) {
        hit = {t, b.category};
      }
    }
    for (const VerticalCylinder& c : cylinders) {
      double t;
      if (IntersectCylinder(c, o, d, &t) && t < hit.t) hit = {t, c.category};
    }
    return hit;
  }
};

MovingBox StaticBox(Eigen::Vector3d lo, Eigen::Vector3d hi, CategoryId cat,
                    std::uint8_t visibility = kAll) {
  MovingBox b;
  b.min = lo;
  b.max = hi;
  b.category = cat;
  b.visibility = visibility;
  return b;
}

World BuildWorld(const SynthConfig& config) {
  World w;
  switch (config.scenario) {
    case Scenario::kMoverAliasing: {
      // Building row on the left with a side street, open lot on the right.
      w.boxes.push_back(StaticBox({-22, -10, 0}, {-12, 40, 12}, kSynthBuilding));
      w.boxes.push_back(StaticBox({-22, 46, 0}, {-12, 140, 15}, kSynthBuilding));
      MovingBox bus = StaticBox({16, 50, 0}, {23, 58, 3.2}, kSynthVehicle);
      bus.velocity = {config.object_speed, 0.0, 0.0};
      bus.depart_time = config.object_depart_time;
      w.boxes.push_back(bus);
      break;
    }
    case Scenario::kOcclusionBleed: {
      w.boxes.push_back(StaticBox({-15, 14, 0}, {15, 14.5, 8}, kSynthBuilding));
      w.boxes.push_back(
          StaticBox({-6, 11, 0}, {-3, 12, 1.2}, kSynthVegetation));
      w.cylinders.push_back({0.5, 8.0, 0.15, 0.0, 4.0, kSynthPole});
      break;
    }
    case Scenario::kFence: {
      w.boxes.push_back(StaticBox({-15, 11, 0}, {15, 11.5, 6}, kSynthBuilding));
      const double x0 = -4.0, x1 = 4.0, y0 = 8.0, y1 = 8.03, height = 2.0;
      const double pitch = 0.3;
      const double slat = std::min(1.0, config.fence_fill_fraction) * pitch;
      const int count = static_cast<int>(std::round((x1 - x0) / pitch));
      for (int i = 0; i < count; ++i) {
        const double xa = x0 + i * pitch;
        // Slats are physical; with fill 1 they tile the rectangle exactly.
        w.boxes.push_back(StaticBox({xa, y0, 0}, {xa + slat, y1, height},
                                    kSynthFence, kLidar | kTruth));
      }
      w.boxes.push_back(StaticBox({x0, y0, 0}, {x0 + count * pitch, y1, height},
                                  kSynthFence, kLabels));
      break;
    }
  }
  return w;
}

std::uint64_t SplitMix64(std::uint64_t* state) {
  std::uint64_t z = (*state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double UnitUniform(std::uint64_t* state) {
  return static_cast<double>(SplitMix64(state) >> 11) * 0x1.0p-53;
}

Eigen::Vector3d EgoPosition(const SynthConfig& c, double t) {
  return {0.0, c.ego_speed * t, 0.0};
}

CameraFrame MakeCamera(const SynthConfig& c, std::int64_t frame_id,
                       double time, double yaw_deg) {
  const double yaw = yaw_deg * kDegree;
  const Eigen::Vector3d right(std::cos(yaw), std::sin(yaw), 0.0);
  const Eigen::Vector3d down(0.0, 0.0, -1.0);
  const Eigen::Vector3d forward(-std::sin(yaw), std::cos(yaw), 0.0);
  CameraFrame cam;
  cam.frame_id = frame_id;
  cam.timestamp = time;
  cam.intrinsics = {c.focal_px,
                    c.focal_px,
                    c.image_width / 2.0,
                    c.image_height / 2.0,
                    c.image_width,
                    c.image_height};
  Eigen::Matrix3d r;
  r.row(0) = right;
  r.row(1) = down;
  r.row(2) = forward;
  const Eigen::Vector3d center =
      EgoPosition(c, time) + Eigen::Vector3d(0.0, 0.0, c.camera_height);
  cam.camera_from_world.rotation = r;
  cam.camera_from_world.translation = -(r * center);
  return cam;
}

// Ray-cast label image as seen by `observer` at the camera time.
LabelImage CastLabels(const World& world, const CameraFrame& cam,
                      Visibility observer) {
  const auto& k = cam.intrinsics;
  const Eigen::Matrix3d world_from_camera =
      cam.camera_from_world.rotation.transpose();
  const Eigen::Vector3d origin = cam.Center();
  LabelImage img(k.width, k.height);
  for (int row = 0; row < k.height; ++row) {
    for (int col = 0; col < k.width; ++col) {
      const Eigen::Vector3d d_cam((col + 0.5 - k.cx) / k.fx,
                                  (row + 0.5 - k.cy) / k.fy, 1.0);
      img.At(row, col) =
          world.Cast(origin, world_from_camera * d_cam, cam.timestamp, observer)
              .category;
    }
  }
  return img;
}

// Grows every `category` pixel into its (2w+1)^2 neighborhood.
LabelImage DilateCategory(const LabelImage& img, CategoryId category, int w) {
  LabelImage out = img;
  if (w <= 0) return out;
  for (int row = 0; row < img.height; ++row) {
    for (int col = 0; col < img.width; ++col) {
      if (img.At(row, col) != category) continue;
      for (int r = std::max(0, row - w); r <= std::min(img.height - 1, row + w);
           ++r) {
        for (int c = std::max(0, col - w); c <= std::min(img.width - 1, col + w);
             ++c) {
          out.At(r, c) = category;
        }
      }
    }
  }
  return out;
}

CategoryId IntruderOf(Scenario s) {
  switch (s) {
    case Scenario::kMoverAliasing:
      return kSynthVehicle;
    case Scenario::kOcclusionBleed:
      return kSynthPole;
    case Scenario::kFence:
      return kSynthFence;
  }
  return kUnlabeled;
}

}  // namespace

std::string ScenarioName(Scenario scenario) {
  switch (scenario) {
    case Scenario::kMoverAliasing:
      return "mover_aliasing";
    case Scenario::kOcclusionBleed:
      return "occlusion_bleed";
    case Scenario::kFence:
      return "fence";
  }
  return "unknown";
}

Scenario ParseScenario(const std::string& name) {
  for (Scenario s : {Scenario::kMoverAliasing, Scenario::kOcclusionBleed,
                     Scenario::kFence}) {
    if (ScenarioName(s) == name) return s;
  }
  throw InvalidArgument("unknown scenario '" + name + "'");
}

ClassTaxonomy SynthTaxonomy() {
  return ClassTaxonomy({{kSynthRoad, "road", false, false},
                        {kSynthBuilding, "building", false, false},
                        {kSynthVehicle, "vehicle", true, false},
                        {kSynthPole, "pole", false, false},
                        {kSynthFence, "fence", false, false},
                        {kSynthVegetation, "vegetation", false, false}});
}

SynthConfig SynthConfig::Default(Scenario scenario) {
  SynthConfig c;
  c.scenario = scenario;
  if (scenario == Scenario::kMoverAliasing) return c;
  // Static rig looking at a close-range target.
  c.ego_speed = 0.0;
  c.camera_frames = 4;
  c.azimuth_step_deg = 0.25;
  c.azimuth_half_fov_deg = 35.0;
  c.elevation_min_deg = -12.0;
  c.elevation_max_deg = 12.0;
  return c;
}

SynthConfig SynthConfig::Performance() {
  SynthConfig c = Default(Scenario::kMoverAliasing);
  c.camera_frames = 20;
  c.camera_yaws_deg = {55.0, 0.0, -55.0};
  c.lidar_range = 60.0;
  c.azimuth_step_deg = 0.3;
  c.elevation_min_deg = -30.0;
  c.elevation_max_deg = 9.0;
  c.max_points = 3000000;
  return c;
}

void CheckSynthConfig(const SynthConfig& c) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(c.camera_rate_hz) || !positive(c.lidar_rate_hz)) {
    throw InvalidArgument("synth: rates must be positive");
  }
  if (!positive(c.azimuth_step_deg) || !positive(c.elevation_step_deg) ||
      !positive(c.azimuth_half_fov_deg) || !positive(c.lidar_range)) {
    throw InvalidArgument("synth: lidar densities must be positive");
  }
  if (c.elevation_max_deg < c.elevation_min_deg) {
    throw InvalidArgument("synth: empty elevation range");
  }
  if (c.camera_frames < 1 || c.camera_yaws_deg.empty() ||
      c.image_width < 1 || c.image_height < 1 || !positive(c.focal_px)) {
    throw InvalidArgument("synth: camera settings must be positive");
  }
  if (c.bleed_width_px < 0) {
    throw InvalidArgument("synth: bleed width must be >= 0");
  }
  if (!(c.fence_fill_fraction > 0.0 && c.fence_fill_fraction <= 1.0)) {
    throw InvalidArgument("synth: fence fill fraction must be in (0, 1]");
  }
  if (!std::isfinite(c.object_speed) || !std::isfinite(c.ego_speed) ||
      !std::isfinite(c.object_depart_time)) {
    throw InvalidArgument("synth: speeds must be finite");
  }
}

SynthScene Generate(const SynthConfig& config) {
  CheckSynthConfig(config);
  const World world = BuildWorld(config);
  SynthScene scene;
  scene.scenario = config.scenario;
  scene.intruder = IntruderOf(config.scenario);
  scene.bundle.taxonomy = SynthTaxonomy();

  // Cameras and labels.
  for (int f = 0; f < config.camera_frames; ++f) {
    const double t = config.camera_time_offset + f / config.camera_rate_hz;
    for (std::size_t y = 0; y < config.camera_yaws_deg.size(); ++y) {
      const std::int64_t id =
          static_cast<std::int64_t>(f * config.camera_yaws_deg.size() + y);
      CameraFrame cam = MakeCamera(config, id, t, config.camera_yaws_deg[y]);
      LabelImage labels = CastLabels(world, cam, kLabels);
      if (config.scenario == Scenario::kOcclusionBleed) {
        labels = DilateCategory(labels, kSynthPole, config.bleed_width_px);
      }
      scene.bundle.cameras.push_back(cam);
      scene.bundle.label_images.push_back(std::move(labels));
    }
  }

  // Lidar sweeps over the span of the camera frames.
  const double duration = config.camera_frames / config.camera_rate_hz;
  const int sweeps =
      std::max(1, static_cast<int>(std::floor(duration * config.lidar_rate_hz)));
  const int azimuths = std::max(
      1, static_cast<int>(std::floor(2.0 * config.azimuth_half_fov_deg /
                                     config.azimuth_step_deg)));
  const int beams = 1 + static_cast<int>(std::floor(
                            (config.elevation_max_deg -
                             config.elevation_min_deg) /
                                config.elevation_step_deg +
                            1e-9));
  std::uint64_t rng = config.rng_seed;
  auto& points = scene.bundle.points;
  bool full = false;
  for (int s = 0; s < sweeps && !full; ++s) {
    const double t = s / config.lidar_rate_hz;
    const Eigen::Vector3d origin =
        EgoPosition(config, t) + Eigen::Vector3d(0.0, 0.0, config.lidar_height);
    // Spinning lidars do not repeat their firing angles sweep to sweep.
    const double phase = UnitUniform(&rng) * config.azimuth_step_deg;
    for (int b = 0; b < beams && !full; ++b) {
      const double el =
          (config.elevation_min_deg + b * config.elevation_step_deg) * kDegree;
      for (int a = 0; a < azimuths; ++a) {
        const double az = (-config.azimuth_half_fov_deg + phase +
                           a * config.azimuth_step_deg) *
                          kDegree;
        const Eigen::Vector3d d(std::sin(az) * std::cos(el),
                                std::cos(az) * std::cos(el), std::sin(el));
        const Hit hit = world.Cast(origin, d, t, kLidar);
        if (!(hit.t <= config.lidar_range)) continue;
        LidarPoint p;
        p.position = origin + hit.t * d;
        p.timestamp = t;
        points.push_back(p);
        scene.ground_truth.push_back(hit.category);
        if (config.max_points && points.size() == config.max_points) {
          full = true;
          break;
        }
      }
    }
  }

  // Conflict regions: points drawn under an intruder label somewhere.
  scene.in_conflict_region.assign(points.size(), 0);
  for (std::size_t i = 0; i < scene.bundle.cameras.size(); ++i) {
    const CameraFrame& cam = scene.bundle.cameras[i];
    const LabelImage& labels = scene.bundle.label_images[i];
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (scene.in_conflict_region[j] ||
          scene.ground_truth[j] == scene.intruder) {
        continue;
      }
      const auto proj = Project(cam, points[j].position);
      if (!proj) continue;
      const int col = static_cast<int>(std::floor(proj->u));
      const int row = static_cast<int>(std::floor(proj->v));
      if (labels.At(row, col) == scene.intruder) {
        scene.in_conflict_region[j] = 1;
      }
    }
  }
  return scene;
}

std::optional<double> ScenarioReport::Precision() const {
  if (labeled == 0) return std::nullopt;
  return static_cast<double>(labeled - errors) / static_cast<double>(labeled);
}

std::size_t ScenarioReport::RoadRegionErrors() const {
  const auto it = region_errors_by_truth.find(kSynthRoad);
  return it == region_errors_by_truth.end() ? 0 : it->second;
}

ScenarioReport MakeScenarioReport(const SynthScene& scene,
                                  std::span<const CategoryId> labels) {
  if (labels.size() != scene.ground_truth.size()) {
    throw InvalidArgument("scenario report: label count mismatch");
  }
  ScenarioReport r;
  r.scenario = ScenarioName(scene.scenario);
  r.points = labels.size();
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const CategoryId truth = scene.ground_truth[j];
    if (labels[j] != kUnlabeled) {
      ++r.labeled;
      r.errors += labels[j] != truth;
    }
    if (!scene.in_conflict_region[j]) continue;
    ++r.region_points;
    if (labels[j] == scene.intruder) {
      ++r.region_errors;
      ++r.region_errors_by_truth[truth];
    }
  }
  return r;
}

std::string ScenarioReportToJson(const ScenarioReport& r) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["points"] = r.points;
  j["labeled"] = r.labeled;
  j["errors"] = r.errors;
  const auto precision = r.Precision();
  j["precision"] = precision ? nlohmann::ordered_json(*precision)
                             : nlohmann::ordered_json(nullptr);
  j["region_points"] = r.region_points;
  j["region_errors"] = r.region_errors;
  nlohmann::ordered_json by_truth = nlohmann::ordered_json::object();
  for (const auto& [id, n] : r.region_errors_by_truth) {
    by_truth[std::to_string(id)] = n;
  }
  j["region_errors_by_truth"] = by_truth;
  return j.dump(2) + "\n";
}

}  // namespace lidarfuse
