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

#include "lidarfuse/scene_io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>

#include "json.hpp"
#include "lidarfuse/errors.h"

namespace lidarfuse {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Splits `text` into lines, tolerating a trailing newline and CRLF.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool Next(std::string_view* line) {
    if (pos_ >= text_.size()) return false;
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view l = text_.substr(pos_, end - pos_);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    pos_ = end + 1;
    ++line_number_;
    *line = l;
    return true;
  }

  std::size_t line_number() const { return line_number_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_number_ = 0;
};

bool ParseDouble(std::string_view s, double* out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

template <typename Int>
bool ParseInt(std::string_view s, Int* out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Splits on commas into at most `max_fields` views; returns the count found.
std::size_t SplitCsv(std::string_view line, std::string_view* fields,
                     std::size_t max_fields) {
  std::size_t n = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (n == max_fields) return max_fields + 1;
    fields[n++] = line.substr(start, comma == std::string_view::npos
                                         ? std::string_view::npos
                                         : comma - start);
    if (comma == std::string_view::npos) return n;
    start = comma + 1;
  }
}

void EnsureDirectory(const std::string& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) {
    throw IoError("cannot create directory " + directory + ": " +
                  ec.message());
  }
}

json ParamsToJson(const FusionParams& p) {
  return json{{"delta_t_max", p.delta_t_max},
              {"tau", p.tau},
              {"dilation_k", p.dilation_k},
              {"d_max", p.d_max},
              {"delta_t_thresh", p.delta_t_thresh}};
}

double JsonNumber(const json& object, const char* key, double fallback,
                  const std::string& path) {
  const auto it = object.find(key);
  if (it == object.end()) return fallback;
  if (!it->is_number()) {
    throw ParseError(path, 0, std::string("'") + key + "' must be a number");
  }
  return it->get<double>();
}

FusionParams ParamsFromJson(const json& j, FusionParams defaults,
                            const std::string& path) {
  if (!j.is_object()) throw ParseError(path, 0, "fusion params not an object");
  static constexpr const char* kKnown[] = {"delta_t_max", "tau", "dilation_k",
                                           "d_max", "delta_t_thresh"};
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kKnown) known = known || key == k;
    if (!known) throw ParseError(path, 0, "unknown fusion key '" + key + "'");
  }
  FusionParams p = defaults;
  p.delta_t_max = JsonNumber(j, "delta_t_max", p.delta_t_max, path);
  p.tau = JsonNumber(j, "tau", p.tau, path);
  p.dilation_k = JsonNumber(j, "dilation_k", p.dilation_k, path);
  p.d_max = JsonNumber(j, "d_max", p.d_max, path);
  p.delta_t_thresh = JsonNumber(j, "delta_t_thresh", p.delta_t_thresh, path);
  try {
    CheckFusionParams(p);
  } catch (const InvalidArgument& e) {
    throw ParseError(path, 0, e.what());
  }
  return p;
}

json ParseJsonFile(const std::string& path) {
  const std::string text = ReadTextFile(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset -> line number.
    std::size_t line = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < limit; ++i) line += text[i] == '\n';
    throw ParseError(path, line, "malformed JSON");
  }
}

std::vector<CameraFrame> ReadCameras(const std::string& path) {
  const json doc = ParseJsonFile(path);
  if (!doc.is_array()) throw ParseError(path, 1, "expected a JSON array");
  std::vector<CameraFrame> cameras;
  cameras.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& c = doc[i];
    const std::string where = "camera " + std::to_string(i) + ": ";
    try {
      CameraFrame cam;
      cam.frame_id = c.at("frame_id").get<std::int64_t>();
      cam.timestamp = c.at("timestamp").get<double>();
      const json& k = c.at("intrinsics");
      cam.intrinsics.fx = k.at("fx").get<double>();
      cam.intrinsics.fy = k.at("fy").get<double>();
      cam.intrinsics.cx = k.at("cx").get<double>();
      cam.intrinsics.cy = k.at("cy").get<double>();
      cam.intrinsics.width = k.at("width").get<int>();
      cam.intrinsics.height = k.at("height").get<int>();
      const json& m = c.at("camera_from_world");
      if (!m.is_array() || m.size() != 16) {
        throw ParseError(path, 0, where + "camera_from_world needs 16 values");
      }
      for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 3; ++col) {
          cam.camera_from_world.rotation(r, col) = m[r * 4 + col].get<double>();
        }
        cam.camera_from_world.translation[r] = m[r * 4 + 3].get<double>();
      }
      if (m[12].get<double>() != 0.0 || m[13].get<double>() != 0.0 ||
          m[14].get<double>() != 0.0 || m[15].get<double>() != 1.0) {
        throw ParseError(path, 0, where + "last pose row must be 0 0 0 1");
      }
      cameras.push_back(cam);
    } catch (const json::exception& e) {
      throw ParseError(path, 0, where + e.what());
    }
  }
  return cameras;
}

std::string CamerasToJson(std::span<const CameraFrame> cameras) {
  // Hand-formatted so floats use the same 17-digit rendering as points.csv.
  std::string out = "[";
  for (std::size_t i = 0; i < cameras.size(); ++i) {
    const CameraFrame& c = cameras[i];
    const Intrinsics& k = c.intrinsics;
    out += i == 0 ? "\n" : ",\n";
    out += "  {\"frame_id\": " + std::to_string(c.frame_id);
    out += ", \"timestamp\": " + FormatDouble(c.timestamp);
    out += ",\n   \"intrinsics\": {\"fx\": " + FormatDouble(k.fx) +
           ", \"fy\": " + FormatDouble(k.fy) + ", \"cx\": " +
           FormatDouble(k.cx) + ", \"cy\": " + FormatDouble(k.cy) +
           ", \"width\": " + std::to_string(k.width) +
           ", \"height\": " + std::to_string(k.height) + "}";
    out += ",\n   \"camera_from_world\": [";
    for (int r = 0; r < 4; ++r) {
      for (int col = 0; col < 4; ++col) {
        double v;
        if (r == 3) {
          v = col == 3 ? 1.0 : 0.0;
        } else if (col == 3) {
          v = c.camera_from_world.translation[r];
        } else {
          v = c.camera_from_world.rotation(r, col);
        }
        if (r + col > 0) out += ", ";
        out += FormatDouble(v);
      }
    }
    out += "]}";
  }
  out += cameras.empty() ? "]\n" : "\n]\n";
  return out;
}

std::vector<LidarPoint> ReadPoints(const std::string& path) {
  const std::string text = ReadTextFile(path);
  LineReader reader(text);
  std::string_view line;
  if (!reader.Next(&line) || line != "x,y,z,t,sensor_id") {
    throw ParseError(path, 1, "expected header 'x,y,z,t,sensor_id'");
  }
  std::vector<LidarPoint> points;
  points.reserve(text.size() / 64);
  std::string_view f[5];
  while (reader.Next(&line)) {
    if (line.empty()) continue;
    const std::size_t n = reader.line_number();
    if (SplitCsv(line, f, 5) != 5) {
      throw ParseError(path, n, "expected 5 comma-separated fields");
    }
    LidarPoint p;
    for (int i = 0; i < 3; ++i) {
      if (!ParseDouble(f[i], &p.position[i])) {
        throw ParseError(path, n, "non-numeric coordinate '" +
                                      std::string(f[i]) + "'");
      }
    }
    if (!ParseDouble(f[3], &p.timestamp)) {
      throw ParseError(path, n,
                       "non-numeric timestamp '" + std::string(f[3]) + "'");
    }
    if (!ParseInt(f[4], &p.sensor_id)) {
      throw ParseError(path, n,
                       "non-integer sensor_id '" + std::string(f[4]) + "'");
    }
    points.push_back(p);
  }
  return points;
}

std::string PointsToCsv(std::span<const LidarPoint> points) {
  std::string out = "x,y,z,t,sensor_id\n";
  out.reserve(points.size() * 96 + out.size());
  char buf[32];
  auto append = [&](double v) {
    const auto r = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 17);
    out.append(buf, r.ptr);
  };
  for (const LidarPoint& p : points) {
    append(p.position.x());
    out += ',';
    append(p.position.y());
    out += ',';
    append(p.position.z());
    out += ',';
    append(p.timestamp);
    out += ',';
    out += std::to_string(p.sensor_id);
    out += '\n';
  }
  return out;
}

// Skips whitespace and '#' comments in a PNM header.
std::size_t SkipPnmSpace(const std::string& data, std::size_t pos) {
  while (pos < data.size()) {
    const char c = data[pos];
    if (c == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++pos;
    } else {
      break;
    }
  }
  return pos;
}

bool ReadPnmInt(const std::string& data, std::size_t* pos, long* out) {
  *pos = SkipPnmSpace(data, *pos);
  const std::size_t start = *pos;
  while (*pos < data.size() && data[*pos] >= '0' && data[*pos] <= '9') ++*pos;
  if (*pos == start || *pos - start > 9) return false;
  *out = std::stol(data.substr(start, *pos - start));
  return true;
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), value,
                               std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return std::move(ss).str();
}

void WriteTextFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw IoError("write failed: " + path);
}

std::string LabelImagePath(const std::string& directory, std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof(name), "%06zu.pgm", index);
  return (fs::path(directory) / kLabelsDir / name).string();
}

Pgm16 ReadPgm16(const std::string& path) {
  const std::string data = ReadTextFile(path);
  if (data.size() < 2 || data[0] != 'P' || data[1] != '5') {
    throw ParseError(path, 1, "not a binary PGM (P5)");
  }
  std::size_t pos = 2;
  long w = 0, h = 0, maxval = 0;
  if (!ReadPnmInt(data, &pos, &w) || !ReadPnmInt(data, &pos, &h) ||
      !ReadPnmInt(data, &pos, &maxval)) {
    throw ParseError(path, 1, "malformed PGM header");
  }
  if (maxval != 65535) {
    throw ParseError(path, 1, "expected maxval 65535, got " +
                                  std::to_string(maxval));
  }
  if (w <= 0 || h <= 0) throw ParseError(path, 1, "empty PGM");
  if (pos >= data.size()) throw ParseError(path, 1, "truncated PGM");
  ++pos;  // single whitespace after maxval
  const std::size_t count = static_cast<std::size_t>(w) * h;
  if (data.size() - pos != 2 * count) {
    throw ParseError(path, 1, "PGM payload has " +
                                  std::to_string(data.size() - pos) +
                                  " bytes, expected " +
                                  std::to_string(2 * count));
  }
  Pgm16 img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.samples.resize(count);
  const auto* bytes = reinterpret_cast<const unsigned char*>(data.data() + pos);
  for (std::size_t i = 0; i < count; ++i) {
    img.samples[i] =
        static_cast<std::uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
  }
  return img;
}

void WritePgm16(const std::string& path, int width, int height,
                std::span<const std::uint16_t> samples) {
  if (width <= 0 || height <= 0 ||
      samples.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidArgument("WritePgm16: sample count does not match size");
  }
  std::string out = "P5\n" + std::to_string(width) + " " +
                    std::to_string(height) + "\n65535\n";
  const std::size_t header = out.size();
  out.resize(header + 2 * samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out[header + 2 * i] = static_cast<char>(samples[i] >> 8);
    out[header + 2 * i + 1] = static_cast<char>(samples[i] & 0xff);
  }
  WriteTextFile(path, out);
}

ClassTaxonomy ReadTaxonomy(const std::string& path) {
  const json doc = ParseJsonFile(path);
  if (!doc.is_array()) throw ParseError(path, 1, "expected a JSON array");
  std::vector<TaxonomyEntry> entries;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    try {
      const json& e = doc[i];
      TaxonomyEntry entry;
      const long id = e.at("id").get<long>();
      if (id < 0 || id >= kUnlabeled) {
        throw ParseError(path, 0, "entry " + std::to_string(i) +
                                      ": id out of range");
      }
      entry.id = static_cast<CategoryId>(id);
      entry.name = e.at("name").get<std::string>();
      entry.is_mover = e.value("is_mover", false);
      entry.is_ignore = e.value("is_ignore", false);
      entries.push_back(std::move(entry));
    } catch (const json::exception& e) {
      throw ParseError(path, 0,
                       "entry " + std::to_string(i) + ": " + e.what());
    }
  }
  ClassTaxonomy taxonomy(std::move(entries));
  const auto violations = ValidateTaxonomy(taxonomy);
  if (!violations.empty()) throw ParseError(path, 0, violations[0].message);
  return taxonomy;
}

void WriteTaxonomy(const ClassTaxonomy& taxonomy, const std::string& path) {
  json doc = json::array();
  for (const TaxonomyEntry& e : taxonomy.entries()) {
    doc.push_back(json{{"id", e.id},
                       {"name", e.name},
                       {"is_mover", e.is_mover},
                       {"is_ignore", e.is_ignore}});
  }
  WriteTextFile(path, doc.dump(2) + "\n");
}

SceneBundle ReadScene(const std::string& directory) {
  if (!fs::is_directory(directory)) {
    throw IoError("scene directory not found: " + directory);
  }
  const fs::path dir(directory);
  SceneBundle bundle;
  bundle.taxonomy = ReadTaxonomy((dir / kTaxonomyFile).string());
  bundle.points = ReadPoints((dir / kPointsFile).string());
  bundle.cameras = ReadCameras((dir / kCamerasFile).string());

  // Count label images present on disk so a mismatch is reported as such
  // rather than as a missing file.
  std::size_t on_disk = 0;
  const fs::path labels_dir = dir / kLabelsDir;
  if (fs::is_directory(labels_dir)) {
    for (const auto& entry : fs::directory_iterator(labels_dir)) {
      on_disk += entry.path().extension() == ".pgm";
    }
  }
  if (on_disk != bundle.cameras.size()) {
    throw Error("camera/label count mismatch in " + directory + ": " +
                std::to_string(bundle.cameras.size()) + " cameras, " +
                std::to_string(on_disk) + " label images");
  }
  bundle.label_images.reserve(on_disk);
  for (std::size_t i = 0; i < on_disk; ++i) {
    Pgm16 pgm = ReadPgm16(LabelImagePath(directory, i));
    LabelImage img;
    img.width = pgm.width;
    img.height = pgm.height;
    img.categories = std::move(pgm.samples);
    bundle.label_images.push_back(std::move(img));
  }

  const auto violations = ValidateScene(bundle);
  if (!violations.empty()) {
    throw Error("invalid scene " + directory + ": " + violations[0].message +
                (violations.size() > 1
                     ? " (+" + std::to_string(violations.size() - 1) +
                           " more)"
                     : std::string()));
  }
  return bundle;
}

void WriteScene(const SceneBundle& bundle, const std::string& directory) {
  if (bundle.cameras.size() != bundle.label_images.size()) {
    throw InvalidArgument("WriteScene: camera/label count mismatch");
  }
  const fs::path dir(directory);
  EnsureDirectory(directory);
  EnsureDirectory((dir / kLabelsDir).string());
  // Stale images from an earlier, larger scene would break the count check.
  for (const auto& entry : fs::directory_iterator(dir / kLabelsDir)) {
    if (entry.path().extension() == ".pgm") fs::remove(entry.path());
  }
  WriteTextFile((dir / kPointsFile).string(), PointsToCsv(bundle.points));
  WriteTextFile((dir / kCamerasFile).string(), CamerasToJson(bundle.cameras));
  WriteTaxonomy(bundle.taxonomy, (dir / kTaxonomyFile).string());
  for (std::size_t i = 0; i < bundle.label_images.size(); ++i) {
    const LabelImage& img = bundle.label_images[i];
    WritePgm16(LabelImagePath(directory, i), img.width, img.height,
               img.categories);
  }
}

std::vector<CategoryId> ReadLabels(const std::string& path,
                                   std::optional<std::size_t> expected_count) {
  const std::string text = ReadTextFile(path);
  LineReader reader(text);
  std::string_view line;
  std::size_t declared = 0;
  if (!reader.Next(&line) || line.substr(0, 6) != "count=" ||
      !ParseInt(line.substr(6), &declared)) {
    throw ParseError(path, 1, "expected 'count=<N>'");
  }
  if (expected_count && *expected_count != declared) {
    throw Error(path + ": declared count " + std::to_string(declared) +
                " does not match point count " +
                std::to_string(*expected_count));
  }
  std::vector<CategoryId> labels;
  labels.reserve(declared);
  while (reader.Next(&line)) {
    if (line.empty()) continue;
    CategoryId id = 0;
    if (!ParseInt(line, &id)) {
      throw ParseError(path, reader.line_number(),
                       "invalid category id '" + std::string(line) + "'");
    }
    if (labels.size() == declared) {
      throw ParseError(path, reader.line_number(),
                       "more ids than declared count " +
                           std::to_string(declared));
    }
    labels.push_back(id);
  }
  if (labels.size() != declared) {
    throw Error(path + ": declared count " + std::to_string(declared) +
                " but file has " + std::to_string(labels.size()) + " ids");
  }
  return labels;
}

void WriteLabels(const std::string& path, std::span<const CategoryId> labels) {
  std::string out = "count=" + std::to_string(labels.size()) + "\n";
  out.reserve(out.size() + labels.size() * 6);
  char buf[8];
  for (CategoryId id : labels) {
    const auto r = std::to_chars(buf, buf + sizeof(buf), id);
    out.append(buf, r.ptr);
    out += '\n';
  }
  WriteTextFile(path, out);
}

FusionConfig ReadFusionConfig(const std::string& path) {
  const json doc = ParseJsonFile(path);
  if (!doc.is_object()) throw ParseError(path, 1, "expected a JSON object");
  FusionConfig config;
  for (const auto& [key, value] : doc.items()) {
    if (key == "supervision") {
      config.supervision =
          ParamsFromJson(value, FusionParams::Supervision(), path);
    } else if (key == "features") {
      json params = value;
      if (params.is_object() && params.contains("fill")) {
        if (!params["fill"].is_boolean()) {
          throw ParseError(path, 0, "'fill' must be a boolean");
        }
        config.fill_features = params["fill"].get<bool>();
        params.erase("fill");
      }
      config.features = ParamsFromJson(params, FusionParams::Features(), path);
    } else if (key == "taxonomy") {
      if (!value.is_string()) {
        throw ParseError(path, 0, "'taxonomy' must be a string");
      }
      config.taxonomy_path = value.get<std::string>();
    } else if (key == "surfels") {
      SurfelEstimationParams& s = config.surfels;
      try {
        s.initial_radius = value.value("initial_radius", s.initial_radius);
        s.max_radius = value.value("max_radius", s.max_radius);
        s.max_neighbors = value.value("max_neighbors", s.max_neighbors);
        s.min_neighbors = value.value("min_neighbors", s.min_neighbors);
        s.stddev_floor_fraction =
            value.value("stddev_floor_fraction", s.stddev_floor_fraction);
        if (value.contains("stddev_floor_clip")) {
          const json& clip = value.at("stddev_floor_clip");
          s.stddev_floor_min = clip.at(0).get<double>();
          s.stddev_floor_max = clip.at(1).get<double>();
        }
        s.tangent_radius_fraction =
            value.value("tangent_radius_fraction", s.tangent_radius_fraction);
        s.rng_seed = value.value("rng_seed", s.rng_seed);
        CheckSurfelParams(s);
      } catch (const json::exception& e) {
        throw ParseError(path, 0, std::string("surfels: ") + e.what());
      } catch (const InvalidArgument& e) {
        throw ParseError(path, 0, e.what());
      }
    } else {
      throw ParseError(path, 0, "unknown key '" + key + "'");
    }
  }
  return config;
}

void WriteFusionConfig(const FusionConfig& config, const std::string& path) {
  json features = ParamsToJson(config.features);
  features["fill"] = config.fill_features;
  const SurfelEstimationParams& s = config.surfels;
  json doc{{"supervision", ParamsToJson(config.supervision)},
           {"features", features},
           {"surfels",
            {{"initial_radius", s.initial_radius},
             {"max_radius", s.max_radius},
             {"max_neighbors", s.max_neighbors},
             {"min_neighbors", s.min_neighbors},
             {"stddev_floor_fraction", s.stddev_floor_fraction},
             {"stddev_floor_clip", {s.stddev_floor_min, s.stddev_floor_max}},
             {"tangent_radius_fraction", s.tangent_radius_fraction},
             {"rng_seed", s.rng_seed}}}};
  if (!config.taxonomy_path.empty()) doc["taxonomy"] = config.taxonomy_path;
  WriteTextFile(path, doc.dump(2) + "\n");
}

void WriteSurfels(const std::string& path, std::span<const Surfel> surfels) {
  std::string out = "nx,ny,nz,tx,ty,tz,r1,r2\n";
  out.reserve(out.size() + surfels.size() * 160);
  for (const Surfel& s : surfels) {
    const double v[8] = {s.normal.x(),  s.normal.y(),     s.normal.z(),
                         s.tangent.x(), s.tangent.y(),    s.tangent.z(),
                         s.radius_tangent, s.radius_bitangent};
    for (int i = 0; i < 8; ++i) {
      if (i) out += ',';
      out += FormatDouble(v[i]);
    }
    out += '\n';
  }
  WriteTextFile(path, out);
}

std::vector<Surfel> ReadSurfels(const std::string& path) {
  const std::string text = ReadTextFile(path);
  LineReader reader(text);
  std::string_view line;
  if (!reader.Next(&line) || line != "nx,ny,nz,tx,ty,tz,r1,r2") {
    throw ParseError(path, 1, "expected header 'nx,ny,nz,tx,ty,tz,r1,r2'");
  }
  std::vector<Surfel> surfels;
  std::string_view f[8];
  while (reader.Next(&line)) {
    if (line.empty()) continue;
    if (SplitCsv(line, f, 8) != 8) {
      throw ParseError(path, reader.line_number(), "expected 8 fields");
    }
    double v[8];
    for (int i = 0; i < 8; ++i) {
      if (!ParseDouble(f[i], &v[i])) {
        throw ParseError(path, reader.line_number(), "non-numeric field");
      }
    }
    Surfel s;
    s.normal = {v[0], v[1], v[2]};
    s.tangent = {v[3], v[4], v[5]};
    s.radius_tangent = v[6];
    s.radius_bitangent = v[7];
    surfels.push_back(s);
  }
  return surfels;
}

}  // namespace lidarfuse
