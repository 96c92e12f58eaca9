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

// Diversity-driven image/scene selection.
//
// Each candidate is summarized by a binary class-presence vector. A selection
// S scores E(S) = sum_c sqrt(n_c) with n_c the number of selected vectors
// containing category c, a monotone submodular function maximized greedily.

#ifndef LIDARFUSE_SAMPLING_H_
#define LIDARFUSE_SAMPLING_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lidarfuse/scene.h"

namespace lidarfuse {

struct ClassVector {
  std::uint64_t id = 0;
  std::vector<std::uint8_t> bits;  // one 0/1 entry per category

  bool operator==(const ClassVector&) const = default;
};

struct SamplingParams {
  double p_min_fraction = 0.02;
  std::size_t n = 1;
  double rarity_percentile = 0.25;
};

// Throws InvalidArgument unless 0 < p_min_fraction < 1, n >= 1 and
// 0 <= rarity_percentile <= 1.
void CheckSamplingParams(const SamplingParams& params);

// v_c = 1 iff histogram[c] / sum(histogram) >= p_min_fraction. Throws
// InvalidArgument when the histogram is empty or all zero.
ClassVector ClassVectorFromHistogram(std::span<const std::uint64_t> histogram,
                                     const SamplingParams& params,
                                     std::uint64_t id = 0);

// Histogram of `image` over [0, category_count); sentinel pixels are left
// out of both the counts and the total. Throws InvalidArgument on an
// all-sentinel image or an id >= category_count.
ClassVector ClassVectorFromImage(const LabelImage& image,
                                 std::size_t category_count,
                                 const SamplingParams& params,
                                 std::uint64_t id = 0);

// sum_c sqrt(counts[c]).
double Objective(std::span<const std::uint64_t> counts);
// Objective of the per-category sums over `selected`.
double SelectionEnergy(std::span<const ClassVector> selected);

struct PrefilterResult {
  std::vector<ClassVector> kept;
  bool unfiltered = false;  // no candidate had a rare category
  double quantile = 0.0;    // rarity cutoff used
};

// Rarity of c = fraction of candidates with v_c = 1. A category is rare when
// its rarity is strictly below the rarity_percentile quantile (linear
// interpolation between order statistics) of the nonzero rarities. Keeps
// candidates with at least one rare category, in input order; if that
// leaves nothing, returns the input with `unfiltered` set.
PrefilterResult PrefilterRare(std::span<const ClassVector> candidates,
                              const SamplingParams& params);

// Linear-interpolation quantile of `values` (need not be sorted). Throws
// InvalidArgument on empty input.
double Quantile(std::vector<double> values, double p);

struct GreedyResult {
  std::vector<std::uint64_t> selected;  // ids, in pick order
  std::vector<double> energies;         // energy after each pick
};

// min(n, |candidates|) rounds, each adding the candidate with the largest
// energy gain; ties go to the lowest id, then the earliest position. All
// vectors must have the same length.
GreedyResult GreedySelect(std::span<const ClassVector> candidates,
                          std::size_t n);

// CSV "id,bit0,bit1,..." with an optional header line starting with "id".
// With `histograms`, the values are per-category pixel counts and are
// converted via ClassVectorFromHistogram.
std::vector<ClassVector> ReadClassVectors(const std::string& path,
                                          bool histograms,
                                          const SamplingParams& params);
void WriteClassVectors(const std::string& path,
                       std::span<const ClassVector> vectors);
// CSV "round,id,energy".
void WriteSelection(const std::string& path, const GreedyResult& result);

}  // namespace lidarfuse

#endif  // LIDARFUSE_SAMPLING_H_
