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

#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "lidarfuse/errors.h"
#include "lidarfuse/scene_io.h"
#include "oracles.h"
#include "test_util.h"

namespace lidarfuse {
namespace {

ClassVector Vec(std::uint64_t id, std::vector<std::uint8_t> bits) {
  return ClassVector{id, std::move(bits)};
}

SamplingParams WithPMin(double p) {
  SamplingParams params;
  params.p_min_fraction = p;
  return params;
}

SamplingParams WithPercentile(double p) {
  SamplingParams params;
  params.rarity_percentile = p;
  return params;
}

TEST(ClassVectorTest, FromHistogram) {
  const std::vector<std::uint64_t> h = {50, 30, 15, 5};
  EXPECT_EQ(ClassVectorFromHistogram(h, WithPMin(0.1), 4).bits,
            (std::vector<std::uint8_t>{1, 1, 1, 0}));
  EXPECT_EQ(ClassVectorFromHistogram(h, WithPMin(0.1), 4).id, 4u);
  // Exactly at the threshold counts as present.
  const std::vector<std::uint64_t> edge = {90, 10};
  EXPECT_EQ(ClassVectorFromHistogram(edge, WithPMin(0.1)).bits,
            (std::vector<std::uint8_t>{1, 1}));
  const std::vector<std::uint64_t> zero = {0, 0};
  EXPECT_THROW(ClassVectorFromHistogram(zero, WithPMin(0.1)),
               InvalidArgument);
}

TEST(ClassVectorTest, FromImageIgnoresSentinel) {
  // 4 pixels of 0, 1 of 1, 5 sentinels.
  LabelImage image(5, 2);
  for (int c = 0; c < 4; ++c) image.At(0, c) = 0;
  image.At(0, 4) = 1;
  EXPECT_EQ(ClassVectorFromImage(image, 3, WithPMin(0.5)).bits,
            (std::vector<std::uint8_t>{1, 0, 0}));
  EXPECT_EQ(ClassVectorFromImage(image, 3, WithPMin(0.2)).bits,
            (std::vector<std::uint8_t>{1, 1, 0}));
  EXPECT_THROW(ClassVectorFromImage(LabelImage(3, 3), 3, WithPMin(0.1)),
               InvalidArgument);
  image.At(1, 0) = 7;
  EXPECT_THROW(ClassVectorFromImage(image, 3, WithPMin(0.1)),
               InvalidArgument);
}

TEST(QuantileTest, LinearInterpolation) {
  const std::vector<double> v = {0.4, 0.1, 0.3, 0.2};
  EXPECT_DOUBLE_EQ(Quantile(v, 0.0), 0.1);
  EXPECT_DOUBLE_EQ(Quantile(v, 0.25), 0.175);
  EXPECT_DOUBLE_EQ(Quantile(v, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(Quantile(v, 1.0), 0.4);
  EXPECT_DOUBLE_EQ(Quantile({3.0}, 0.7), 3.0);
  EXPECT_THROW(Quantile({}, 0.5), InvalidArgument);
}

TEST(PrefilterTest, KeepsCandidatesWithRareCategories) {
  // Rarities: c0 1.0, c1 0.5, c2 0.25.
  const std::vector<ClassVector> c = {Vec(0, {1, 1, 0}), Vec(1, {1, 0, 0}),
                                      Vec(2, {1, 1, 0}), Vec(3, {1, 0, 1})};
  PrefilterResult r = PrefilterRare(c, WithPercentile(0.25));
  EXPECT_DOUBLE_EQ(r.quantile, 0.375);
  EXPECT_FALSE(r.unfiltered);
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0].id, 3u);

  // Quantile 0.5; c1 sits on it and is not strictly rarer.
  r = PrefilterRare(c, WithPercentile(0.5));
  ASSERT_EQ(r.kept.size(), 1u);

  r = PrefilterRare(c, WithPercentile(0.75));
  ASSERT_EQ(r.kept.size(), 3u);
  EXPECT_EQ(r.kept[0].id, 0u);
  EXPECT_EQ(r.kept[1].id, 2u);
  EXPECT_EQ(r.kept[2].id, 3u);
}

TEST(PrefilterTest, FallsBackToAllCandidates) {
  const std::vector<ClassVector> same = {Vec(0, {1, 1, 0}), Vec(1, {1, 1, 0})};
  const PrefilterResult r = PrefilterRare(same, WithPercentile(0.25));
  EXPECT_TRUE(r.unfiltered);
  EXPECT_EQ(r.kept, same);

  const std::vector<ClassVector> empty_bits = {Vec(0, {0, 0})};
  EXPECT_TRUE(PrefilterRare(empty_bits, WithPercentile(0.5)).unfiltered);

  const std::vector<ClassVector> c = {Vec(0, {1, 1}), Vec(1, {1, 0})};
  EXPECT_TRUE(PrefilterRare(c, WithPercentile(0.0)).unfiltered);
}

TEST(GreedySelectTest, HandExampleAndIdTieBreak) {
  const std::vector<ClassVector> c = {
      Vec(12, {0, 0, 1, 1}), Vec(10, {1, 1, 0, 0}), Vec(11, {1, 0, 0, 0}),
      Vec(13, {0, 0, 1, 0})};
  const GreedyResult r = GreedySelect(c, 2);
  EXPECT_EQ(r.selected, (std::vector<std::uint64_t>{10, 12}));
  EXPECT_EQ(r.energies, (std::vector<double>{2.0, 4.0}));

  const GreedyResult all = GreedySelect(c, 10);
  ASSERT_EQ(all.selected.size(), 4u);
  EXPECT_DOUBLE_EQ(all.energies.back(), 2 * std::sqrt(2.0) + 2);
  EXPECT_TRUE(GreedySelect({}, 3).selected.empty());
}

TEST(GreedySelectTest, WithinBoundOfExhaustiveOptimum) {
  std::mt19937_64 rng(41);
  std::bernoulli_distribution bit(0.3);
  std::uniform_int_distribution<int> count(1, 12), len(1, 8), pick(1, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = count(rng), l = len(rng);
    std::vector<ClassVector> c;
    std::vector<std::vector<std::uint8_t>> raw;
    for (int i = 0; i < m; ++i) {
      std::vector<std::uint8_t> b(l);
      for (auto& x : b) x = bit(rng);
      raw.push_back(b);
      c.push_back(Vec(static_cast<std::uint64_t>(m - i), b));
    }
    const std::size_t n = pick(rng);
    const GreedyResult r = GreedySelect(c, n);
    ASSERT_EQ(r.selected.size(), std::min<std::size_t>(n, m));

    std::map<std::uint64_t, std::size_t> position;
    for (int i = 0; i < m; ++i) position[c[i].id] = i;
    std::vector<std::size_t> chosen;
    for (std::size_t k = 0; k < r.selected.size(); ++k) {
      chosen.push_back(position.at(r.selected[k]));
      ASSERT_NEAR(r.energies[k], oracle::Energy(raw, chosen), 1e-12);
      if (k > 0) {
        ASSERT_GE(r.energies[k], r.energies[k - 1]);
      }
    }
    const double best = oracle::BestEnergy(raw, n);
    ASSERT_GE(r.energies.back(), (1.0 - 1.0 / std::exp(1.0)) * best - 1e-12);
    ASSERT_LE(r.energies.back(), best + 1e-12);
  }
}

TEST(ObjectiveTest, DiminishingReturns) {
  std::mt19937_64 rng(42);
  std::bernoulli_distribution bit(0.4);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<ClassVector> a, b;
    for (int i = 0; i < 6; ++i) {
      std::vector<std::uint8_t> v(5);
      for (auto& x : v) x = bit(rng);
      if (i < 3) a.push_back(Vec(i, v));
      b.push_back(Vec(i, v));  // a is a subset of b
    }
    std::vector<std::uint8_t> xv(5);
    for (auto& x : xv) x = bit(rng);
    const ClassVector x = Vec(99, xv);
    auto with = [&](std::vector<ClassVector> s) {
      s.push_back(x);
      return SelectionEnergy(s);
    };
    const double gain_a = with(a) - SelectionEnergy(a);
    const double gain_b = with(b) - SelectionEnergy(b);
    ASSERT_GE(gain_a, gain_b - 1e-12);
    ASSERT_GE(gain_b, -1e-12);
  }
  const std::vector<std::uint64_t> counts = {4, 9, 0};
  EXPECT_EQ(Objective(counts), 5.0);
}

TEST(SamplingParamsTest, Checks) {
  EXPECT_NO_THROW(CheckSamplingParams(SamplingParams{}));
  EXPECT_THROW(CheckSamplingParams(WithPMin(0.0)), InvalidArgument);
  EXPECT_THROW(CheckSamplingParams(WithPMin(1.0)), InvalidArgument);
  EXPECT_THROW(CheckSamplingParams(WithPercentile(1.5)), InvalidArgument);
  SamplingParams p;
  p.n = 0;
  EXPECT_THROW(CheckSamplingParams(p), InvalidArgument);
}

TEST(SamplingIoTest, VectorsHistogramsAndSelection) {
  testing::TempDir dir("sampling");
  const std::vector<ClassVector> v = {Vec(5, {1, 0, 1}), Vec(9, {0, 1, 1})};
  WriteClassVectors(dir / "v.csv", v);
  EXPECT_EQ(ReadTextFile(dir / "v.csv"), "id,bit0,bit1,bit2\n5,1,0,1\n9,0,1,1\n");
  EXPECT_EQ(ReadClassVectors(dir / "v.csv", false, SamplingParams{}), v);

  WriteTextFile(dir / "h.csv", "id,road,pole\n3,90,10\n4,99,1\n");
  const auto h = ReadClassVectors(dir / "h.csv", true, WithPMin(0.1));
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0], Vec(3, {1, 1}));
  EXPECT_EQ(h[1], Vec(4, {1, 0}));

  WriteTextFile(dir / "bad.csv", "1,0,1\n2,1\n");
  EXPECT_THROW(ReadClassVectors(dir / "bad.csv", false, SamplingParams{}),
               Error);

  GreedyResult r;
  r.selected = {10, 12};
  r.energies = {2.0, 2.5};
  WriteSelection(dir / "s.csv", r);
  EXPECT_EQ(ReadTextFile(dir / "s.csv"), "round,id,energy\n1,10,2\n2,12,2.5\n");
}

}  // namespace
}  // namespace lidarfuse
