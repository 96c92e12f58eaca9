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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace lidarfuse::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int UniformInt(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

double Weight(double distance, double dt, double d_max, double dt_max) {
  const double a = 1.0 - std::pow(distance / d_max, 2);
  const double b = 1.0 - std::pow(dt / dt_max, 2);
  return a * a * b * b;
}

Pixel ProjectPoint(const CameraFrame& camera, const Eigen::Vector3d& p) {
  const Eigen::Vector3d c = camera.camera_from_world.rotation * p +
                            camera.camera_from_world.translation;
  Pixel px;
  if (c.z() <= 0.0) return px;
  const Intrinsics& k = camera.intrinsics;
  px.u = k.fx * c.x() / c.z() + k.cx;
  px.v = k.fy * c.y() / c.z() + k.cy;
  px.z = c.z();
  px.in_view = px.u >= 0.0 && px.u < k.width && px.v >= 0.0 && px.v < k.height;
  return px;
}

std::vector<double> RenderDepth(const CameraFrame& camera,
                                std::span<const Disk> disks, double dilation) {
  const Intrinsics& k = camera.intrinsics;
  const Eigen::Matrix3d& r = camera.camera_from_world.rotation;
  const Eigen::Vector3d eye = camera.Center();
  std::vector<double> depth(static_cast<std::size_t>(k.width) * k.height,
                            kInf);
  for (const Disk& disk : disks) {
    const Eigen::Vector3d to_eye = (eye - disk.center).normalized();
    if (std::abs(disk.surfel.normal.dot(to_eye)) <= 1e-3) continue;
    const Eigen::Vector3d c = camera.camera_from_world.Apply(disk.center);
    const Eigen::Vector3d n = r * disk.surfel.normal;
    const Eigen::Vector3d t = r * disk.surfel.tangent;
    const Eigen::Vector3d b = r * disk.surfel.Bitangent();
    const double ra = dilation * disk.surfel.radius_tangent;
    const double rb = dilation * disk.surfel.radius_bitangent;
    for (int row = 0; row < k.height; ++row) {
      for (int col = 0; col < k.width; ++col) {
        const Eigen::Vector3d ray((col + 0.5 - k.cx) / k.fx,
                                  (row + 0.5 - k.cy) / k.fy, 1.0);
        const double denom = n.dot(ray);
        if (denom == 0.0) continue;
        const double s = n.dot(c) / denom;
        if (!(s > 0.0)) continue;
        const Eigen::Vector3d q = s * ray - c;
        const double x = q.dot(t) / ra, y = q.dot(b) / rb;
        if (x * x + y * y > 1.0) continue;
        double& d = depth[static_cast<std::size_t>(row) * k.width + col];
        d = std::min(d, s);
      }
    }
  }
  return depth;
}

std::vector<Disk> DiskScene::Disks() const {
  std::vector<Disk> disks;
  for (std::size_t i = 0; i < points.size(); ++i) {
    disks.push_back({points[i].position, surfels[i]});
  }
  return disks;
}

DiskScene RandomDiskScene(std::mt19937_64& rng, int max_image,
                          int max_disks) {
  auto u = [&] { return Uniform(rng, -1.0, 1.0); };
  DiskScene s;
  const int w = UniformInt(rng, 8, max_image);
  const int h = UniformInt(rng, 8, max_image);
  const double f = (0.5 + 0.5 * std::abs(u())) * w;
  s.camera.intrinsics = {f, f, w * (0.5 + 0.2 * u()), h * (0.5 + 0.2 * u()),
                         w, h};
  const Eigen::Vector3d eye(u(), u(), u());
  const Eigen::Vector3d target(u(), u(), 6.0);
  s.camera.camera_from_world = LookAt(eye, target);
  const int n = UniformInt(rng, 1, max_disks);
  for (int i = 0; i < n; ++i) {
    LidarPoint p;
    p.position = {3 * u(), 3 * u(), 6.0 + 3 * u()};
    Surfel sf;
    sf.normal = Eigen::Vector3d(u(), u(), u()).normalized();
    if (i % 10 == 0) {
      const Eigen::Vector3d view = (eye - p.position).normalized();
      sf.normal = (sf.normal - sf.normal.dot(view) * view).normalized();
    }
    sf.tangent = sf.normal.unitOrthogonal();
    sf.radius_tangent = 0.02 + 0.2 * std::abs(u());
    sf.radius_bitangent = sf.radius_tangent * (0.2 + 0.8 * std::abs(u()));
    s.points.push_back(p);
    s.surfels.push_back(sf);
  }
  return s;
}

std::vector<CategoryId> Fuse(const SceneBundle& scene,
                             std::span<const Surfel> surfels,
                             const Params& params) {
  const std::size_t n = scene.points.size();
  std::vector<std::map<CategoryId, double>> votes(n);
  for (std::size_t i = 0; i < scene.cameras.size(); ++i) {
    const CameraFrame& cam = scene.cameras[i];
    const Eigen::Vector3d eye = cam.Center();
    std::vector<Disk> disks;
    std::vector<std::size_t> visible;
    for (std::size_t j = 0; j < n; ++j) {
      const LidarPoint& p = scene.points[j];
      if ((p.position - eye).norm() > params.d_max) continue;
      if (!ProjectPoint(cam, p.position).in_view) continue;
      visible.push_back(j);
      if (std::abs(cam.timestamp - p.timestamp) <= params.dt_thresh) {
        disks.push_back({p.position, surfels[j]});
      }
    }
    const std::vector<double> depth = RenderDepth(cam, disks, params.k);
    for (std::size_t j : visible) {
      const LidarPoint& p = scene.points[j];
      const double dt = cam.timestamp - p.timestamp;
      if (std::abs(dt) > params.dt_max) continue;
      const Eigen::Vector3d to_eye = (eye - p.position).normalized();
      if (std::abs(surfels[j].normal.dot(to_eye)) <= 1e-3) continue;
      const Pixel px = ProjectPoint(cam, p.position);
      const int col = static_cast<int>(std::floor(px.u));
      const int row = static_cast<int>(std::floor(px.v));
      const double d =
          depth[static_cast<std::size_t>(row) * cam.intrinsics.width + col];
      if (std::isinf(d) || std::abs(px.z - d) / px.z > params.tau) continue;
      const CategoryId label = scene.label_images[i].At(row, col);
      if (label == kUnlabeled) continue;
      const double w =
          Weight((p.position - eye).norm(), dt, params.d_max, params.dt_max);
      if (w > 0.0) votes[j][label] += w;
    }
  }
  std::vector<CategoryId> labels(n, kUnlabeled);
  for (std::size_t j = 0; j < n; ++j) {
    double best = -1.0;
    // std::map iterates ascending, so strict > keeps the lowest id on ties.
    for (const auto& [c, w] : votes[j]) {
      if (w > best) {
        best = w;
        labels[j] = c;
      }
    }
  }
  return labels;
}

std::vector<CategoryId> Fill(std::span<const LidarPoint> points,
                             std::span<const CategoryId> labels) {
  std::vector<CategoryId> out(labels.begin(), labels.end());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (labels[i] != kUnlabeled) continue;
    double best = kInf;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (labels[j] == kUnlabeled) continue;
      const double d = (points[i].position - points[j].position).squaredNorm();
      if (d < best) {
        best = d;
        out[i] = labels[j];
      }
    }
  }
  return out;
}

double Energy(const std::vector<std::vector<std::uint8_t>>& vectors,
              const std::vector<std::size_t>& chosen) {
  if (vectors.empty()) return 0.0;
  std::vector<int> counts(vectors[0].size(), 0);
  for (std::size_t i : chosen) {
    for (std::size_t c = 0; c < counts.size(); ++c) counts[c] += vectors[i][c];
  }
  double e = 0.0;
  for (int n : counts) e += std::sqrt(static_cast<double>(n));
  return e;
}

double BestEnergy(const std::vector<std::vector<std::uint8_t>>& vectors,
                  std::size_t n) {
  const std::size_t m = vectors.size();
  const std::size_t size = std::min(n, m);
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != size) continue;
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1u << i)) chosen.push_back(i);
    }
    best = std::max(best, Energy(vectors, chosen));
  }
  return best;
}

RigidTransform LookAt(const Eigen::Vector3d& eye,
                      const Eigen::Vector3d& target) {
  const Eigen::Vector3d forward = (target - eye).normalized();
  Eigen::Vector3d right = forward.cross(Eigen::Vector3d::UnitZ());
  if (right.norm() < 1e-9) right = Eigen::Vector3d::UnitX();
  right.normalize();
  const Eigen::Vector3d down = forward.cross(right);
  RigidTransform pose;
  pose.rotation.row(0) = right;
  pose.rotation.row(1) = down;
  pose.rotation.row(2) = forward;
  pose.translation = -(pose.rotation * eye);
  return pose;
}

SceneBundle RandomScene(std::mt19937_64& rng,
                        const RandomSceneOptions& options) {
  SceneBundle scene;
  std::vector<TaxonomyEntry> entries;
  for (int c = 0; c < options.categories; ++c) {
    entries.push_back({static_cast<CategoryId>(c), "c" + std::to_string(c),
                       c == 1, false});
  }
  scene.taxonomy = ClassTaxonomy(entries);

  // Lidar points: a ground patch plus vertical walls, each with its own
  // sweep time.
  const int target = UniformInt(rng, options.max_points / 2,
                                options.max_points);
  const int walls = UniformInt(rng, 1, 4);
  while (static_cast<int>(scene.points.size()) < target) {
    LidarPoint p;
    const int surface = UniformInt(rng, 0, walls);
    const double step = 0.15;
    if (surface == 0) {
      p.position = {std::round(Uniform(rng, -4, 4) / step) * step,
                    std::round(Uniform(rng, 2, 10) / step) * step, 0.0};
    } else {
      const double y = 3.0 + 1.7 * surface;
      const double x0 = -3.0 + surface;
      p.position = {x0 + std::round(Uniform(rng, 0, 2.5) / step) * step, y,
                    std::round(Uniform(rng, 0, 2.0) / step) * step};
    }
    p.position += Eigen::Vector3d(Uniform(rng, -0.01, 0.01),
                                  Uniform(rng, -0.01, 0.01),
                                  Uniform(rng, -0.01, 0.01));
    p.timestamp = 0.1 * UniformInt(rng, 0, 20);
    scene.points.push_back(p);
  }

  const int cameras = UniformInt(rng, 1, options.max_cameras);
  for (int i = 0; i < cameras; ++i) {
    CameraFrame cam;
    cam.frame_id = i;
    cam.timestamp = 0.05 + Uniform(rng, 0.0, 2.0);
    const int w = UniformInt(rng, options.max_image / 2, options.max_image);
    const int h = UniformInt(rng, options.max_image / 2, options.max_image);
    const double f = Uniform(rng, 0.6, 1.2) * w;
    cam.intrinsics = {f, f, w / 2.0, h / 2.0, w, h};
    const Eigen::Vector3d eye(Uniform(rng, -2, 2), Uniform(rng, -3, 0),
                              Uniform(rng, 1, 3));
    const Eigen::Vector3d at(Uniform(rng, -1, 1), Uniform(rng, 4, 8),
                             Uniform(rng, 0, 1));
    cam.camera_from_world = LookAt(eye, at);
    scene.cameras.push_back(cam);

    LabelImage labels(w, h);
    const int block = UniformInt(rng, 4, 12);
    for (int r = 0; r < h; r += block) {
      for (int c = 0; c < w; c += block) {
        const int pick = UniformInt(rng, 0, options.categories);
        const CategoryId id = pick == options.categories
                                  ? kUnlabeled
                                  : static_cast<CategoryId>(pick);
        for (int rr = r; rr < std::min(h, r + block); ++rr) {
          for (int cc = c; cc < std::min(w, c + block); ++cc) {
            labels.At(rr, cc) = id;
          }
        }
      }
    }
    scene.label_images.push_back(std::move(labels));
  }
  return scene;
}

}  // namespace lidarfuse::oracle
