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

#include "lidarfuse/sampling.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string_view>

#include "lidarfuse/errors.h"
#include "lidarfuse/scene_io.h"

namespace lidarfuse {

namespace {

std::size_t VectorLength(std::span<const ClassVector> vectors) {
  if (vectors.empty()) return 0;
  const std::size_t len = vectors.front().bits.size();
  for (const ClassVector& v : vectors) {
    if (v.bits.size() != len) {
      throw InvalidArgument("class vectors differ in length");
    }
  }
  return len;
}

// Gain of adding `v` given per-category counts; summed in category order.
double Gain(const ClassVector& v, const std::vector<std::uint64_t>& counts) {
  double gain = 0.0;
  for (std::size_t c = 0; c < v.bits.size(); ++c) {
    if (!v.bits[c]) continue;
    const double n = static_cast<double>(counts[c]);
    gain += std::sqrt(n + 1.0) - std::sqrt(n);
  }
  return gain;
}

}  // namespace

void CheckSamplingParams(const SamplingParams& p) {
  if (!(p.p_min_fraction > 0.0 && p.p_min_fraction < 1.0)) {
    throw InvalidArgument("p_min_fraction must be in (0, 1)");
  }
  if (p.n < 1) throw InvalidArgument("selection size must be >= 1");
  if (!(p.rarity_percentile >= 0.0 && p.rarity_percentile <= 1.0)) {
    throw InvalidArgument("rarity_percentile must be in [0, 1]");
  }
}

ClassVector ClassVectorFromHistogram(std::span<const std::uint64_t> histogram,
                                     const SamplingParams& params,
                                     std::uint64_t id) {
  CheckSamplingParams(params);
  std::uint64_t total = 0;
  for (std::uint64_t h : histogram) total += h;
  if (total == 0) {
    throw InvalidArgument("class vector: no labeled pixels");
  }
  ClassVector v;
  v.id = id;
  v.bits.resize(histogram.size());
  for (std::size_t c = 0; c < histogram.size(); ++c) {
    v.bits[c] = static_cast<double>(histogram[c]) /
                    static_cast<double>(total) >=
                params.p_min_fraction;
  }
  return v;
}

ClassVector ClassVectorFromImage(const LabelImage& image,
                                 std::size_t category_count,
                                 const SamplingParams& params,
                                 std::uint64_t id) {
  std::vector<std::uint64_t> histogram(category_count, 0);
  for (CategoryId c : image.categories) {
    if (c == kUnlabeled) continue;
    if (c >= category_count) {
      throw InvalidArgument("class vector: category id out of range");
    }
    ++histogram[c];
  }
  return ClassVectorFromHistogram(histogram, params, id);
}

double Objective(std::span<const std::uint64_t> counts) {
  double energy = 0.0;
  for (std::uint64_t n : counts) energy += std::sqrt(static_cast<double>(n));
  return energy;
}

double SelectionEnergy(std::span<const ClassVector> selected) {
  std::vector<std::uint64_t> counts(VectorLength(selected), 0);
  for (const ClassVector& v : selected) {
    for (std::size_t c = 0; c < counts.size(); ++c) counts[c] += v.bits[c];
  }
  return Objective(counts);
}

double Quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidArgument("quantile of empty set");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) *
                          (values[lo + 1] - values[lo]);
}

PrefilterResult PrefilterRare(std::span<const ClassVector> candidates,
                              const SamplingParams& params) {
  CheckSamplingParams(params);
  if (candidates.empty()) {
    throw InvalidArgument("prefilter: no candidates");
  }
  const std::size_t len = VectorLength(candidates);
  std::vector<std::uint64_t> present(len, 0);
  for (const ClassVector& v : candidates) {
    for (std::size_t c = 0; c < len; ++c) present[c] += v.bits[c];
  }
  std::vector<double> rarity(len, 0.0);
  std::vector<double> nonzero;
  for (std::size_t c = 0; c < len; ++c) {
    rarity[c] = static_cast<double>(present[c]) /
                static_cast<double>(candidates.size());
    if (present[c] > 0) nonzero.push_back(rarity[c]);
  }

  PrefilterResult result;
  if (nonzero.empty()) {
    result.kept.assign(candidates.begin(), candidates.end());
    result.unfiltered = true;
    return result;
  }
  result.quantile = Quantile(nonzero, params.rarity_percentile);
  std::vector<std::uint8_t> rare(len, 0);
  for (std::size_t c = 0; c < len; ++c) {
    rare[c] = present[c] > 0 && rarity[c] < result.quantile;
  }
  for (const ClassVector& v : candidates) {
    bool keep = false;
    for (std::size_t c = 0; c < len && !keep; ++c) keep = v.bits[c] && rare[c];
    if (keep) result.kept.push_back(v);
  }
  if (result.kept.empty()) {
    result.kept.assign(candidates.begin(), candidates.end());
    result.unfiltered = true;
  }
  return result;
}

GreedyResult GreedySelect(std::span<const ClassVector> candidates,
                          std::size_t n) {
  const std::size_t len = VectorLength(candidates);
  const std::size_t m = candidates.size();
  GreedyResult result;
  if (m == 0 || n == 0) return result;

  // Inverted index: category -> candidates containing it.
  std::vector<std::vector<std::uint32_t>> holders(len);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c = 0; c < len; ++c) {
      if (candidates[i].bits[c]) {
        holders[c].push_back(static_cast<std::uint32_t>(i));
      }
    }
  }
  std::vector<std::uint64_t> counts(len, 0);
  std::vector<double> gain(m);
  for (std::size_t i = 0; i < m; ++i) gain[i] = Gain(candidates[i], counts);
  std::vector<std::uint8_t> taken(m, 0);
  std::vector<std::uint8_t> stale(m, 0);

  const std::size_t rounds = std::min(n, m);
  for (std::size_t round = 0; round < rounds; ++round) {
    std::size_t best = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (taken[i]) continue;
      if (best == m || gain[i] > gain[best] ||
          (gain[i] == gain[best] && candidates[i].id < candidates[best].id)) {
        best = i;
      }
    }
    taken[best] = 1;
    result.selected.push_back(candidates[best].id);
    // Only candidates sharing a category with the pick change gain.
    std::vector<std::uint32_t> touched;
    for (std::size_t c = 0; c < len; ++c) {
      if (!candidates[best].bits[c]) continue;
      ++counts[c];
      for (std::uint32_t i : holders[c]) {
        if (!taken[i] && !stale[i]) {
          stale[i] = 1;
          touched.push_back(i);
        }
      }
    }
    for (std::uint32_t i : touched) {
      gain[i] = Gain(candidates[i], counts);
      stale[i] = 0;
    }
    result.energies.push_back(Objective(counts));
  }
  return result;
}

std::vector<ClassVector> ReadClassVectors(const std::string& path,
                                          bool histograms,
                                          const SamplingParams& params) {
  const std::string text = ReadTextFile(path);
  std::vector<ClassVector> vectors;
  std::size_t pos = 0;
  std::size_t line_number = 0;
  std::size_t width = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_number == 1 && line.substr(0, 2) == "id") continue;

    std::vector<std::uint64_t> values;
    std::uint64_t id = 0;
    bool first = true;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string_view::npos) comma = line.size();
      const std::string_view field = line.substr(start, comma - start);
      std::uint64_t value = 0;
      const auto r =
          std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || r.ec != std::errc() ||
          r.ptr != field.data() + field.size()) {
        throw ParseError(path, line_number,
                         "non-integer field '" + std::string(field) + "'");
      }
      if (first) {
        id = value;
        first = false;
      } else {
        values.push_back(value);
      }
      start = comma + 1;
    }
    if (values.empty()) {
      throw ParseError(path, line_number, "row has no category columns");
    }
    if (width == 0) width = values.size();
    if (values.size() != width) {
      throw ParseError(path, line_number, "row length differs from first row");
    }
    if (histograms) {
      try {
        vectors.push_back(ClassVectorFromHistogram(values, params, id));
      } catch (const InvalidArgument& e) {
        throw ParseError(path, line_number, e.what());
      }
    } else {
      ClassVector v;
      v.id = id;
      for (std::uint64_t b : values) {
        if (b > 1) throw ParseError(path, line_number, "bits must be 0 or 1");
        v.bits.push_back(static_cast<std::uint8_t>(b));
      }
      vectors.push_back(std::move(v));
    }
  }
  return vectors;
}

void WriteClassVectors(const std::string& path,
                       std::span<const ClassVector> vectors) {
  const std::size_t len = VectorLength(vectors);
  std::string out = "id";
  for (std::size_t c = 0; c < len; ++c) out += ",bit" + std::to_string(c);
  out += '\n';
  for (const ClassVector& v : vectors) {
    out += std::to_string(v.id);
    for (std::uint8_t b : v.bits) {
      out += ',';
      out += b ? '1' : '0';
    }
    out += '\n';
  }
  WriteTextFile(path, out);
}

void WriteSelection(const std::string& path, const GreedyResult& result) {
  std::string out = "round,id,energy\n";
  for (std::size_t r = 0; r < result.selected.size(); ++r) {
    out += std::to_string(r + 1) + "," + std::to_string(result.selected[r]) +
           "," + FormatDouble(result.energies[r]) + "\n";
  }
  WriteTextFile(path, out);
}

}  // namespace lidarfuse
