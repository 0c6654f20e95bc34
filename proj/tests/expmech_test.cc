//
// Copyright 2026 The dpq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#include "dpq/expmech.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "absl/status/status.h"
#include "dpq/core.h"
#include "dpq/random.h"
#include "test_oracles.h"

namespace dpq {
namespace {

using ::dpq::testing::GapMassOnMidpointGrid;
using ::dpq::testing::TotalVariation;

constexpr double kInf = std::numeric_limits<double>::infinity();

Interval Domain(double lo, double hi) { return Interval::Create(lo, hi).value(); }

std::vector<double> Probabilities(const std::vector<WeightedInterval>& dist) {
  std::vector<double> p;
  for (const WeightedInterval& w : dist) p.push_back(w.probability);
  return p;
}

std::vector<double> Normalize(std::vector<double> w) {
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

const std::vector<double> kEvens = {2, 4, 6, 8};

TEST(IntervalDistributionTest, MedianOfEvens) {
  const std::vector<WeightedInterval> dist =
      IntervalDistribution(Domain(0, 10), kEvens, 0.5, 2.0).value();
  ASSERT_EQ(dist.size(), 5u);
  // Equal widths; utilities -2, -1, 0, -1, -2 at eps / 2 = 1.
  const double z = 1.0 + 2.0 * std::exp(-1.0) + 2.0 * std::exp(-2.0);
  EXPECT_NEAR(dist[2].probability, 1.0 / z, 1e-15);
  EXPECT_NEAR(dist[2].probability, 0.49840, 1e-5);
  EXPECT_NEAR(dist[0].probability, std::exp(-2.0) / z, 1e-15);
  EXPECT_NEAR(dist[4].probability, std::exp(-2.0) / z, 1e-15);
  EXPECT_EQ(dist[2].interval.utility, 0);
  EXPECT_EQ(dist[2].interval.index, 3u);
  EXPECT_DOUBLE_EQ(dist[2].interval.lo, 4.0);
  EXPECT_DOUBLE_EQ(dist[2].interval.hi, 6.0);
}

TEST(IntervalDistributionTest, LowerQuartileOfEvens) {
  const std::vector<WeightedInterval> dist =
      IntervalDistribution(Domain(0, 10), kEvens, 0.25, 2.0).value();
  const std::vector<double> expected =
      Normalize({std::exp(-1.0), 1.0, std::exp(-1.0), std::exp(-2.0),
                 std::exp(-3.0)});
  EXPECT_LT(TotalVariation(Probabilities(dist), expected), 1e-15);
}

TEST(IntervalDistributionTest, ZeroEpsilonIsWidthProportional) {
  const std::vector<double> points = {1, 2, 7};
  const std::vector<WeightedInterval> dist =
      IntervalDistribution(Domain(0, 10), points, 0.5, 0.0).value();
  EXPECT_LT(TotalVariation(Probabilities(dist), {0.1, 0.1, 0.5, 0.3}), 1e-15);
}

TEST(IntervalDistributionTest, InfiniteEpsilonPicksTrueQuantileGap) {
  const std::vector<WeightedInterval> dist =
      IntervalDistribution(Domain(0, 10), kEvens, 0.5, kInf).value();
  EXPECT_LT(TotalVariation(Probabilities(dist), {0, 0, 1, 0, 0}), 1e-15);
}

TEST(IntervalDistributionTest, EmptyDataIsOneGap) {
  const std::vector<WeightedInterval> dist =
      IntervalDistribution(Domain(-1, 1), {}, 0.3, 1.0).value();
  ASSERT_EQ(dist.size(), 1u);
  EXPECT_DOUBLE_EQ(dist[0].probability, 1.0);
}

TEST(IntervalDistributionTest, MatchesMidpointGridBruteForce) {
  RandomSource rng(5);
  for (int instance = 0; instance < 20; ++instance) {
    const int width = 10 + static_cast<int>(rng() % 30);
    std::set<int> picked;
    const size_t n = 1 + rng() % 12;
    while (picked.size() < n) picked.insert(1 + rng() % (width - 1));
    const std::vector<double> points(picked.begin(), picked.end());
    const double q = 0.05 + 0.9 * rng.Uniform();
    const double eps = 0.1 + 3.0 * rng.Uniform();
    const std::vector<WeightedInterval> dist =
        IntervalDistribution(Domain(0, width), points, q, eps).value();
    const std::vector<double> oracle =
        GapMassOnMidpointGrid(width, points, q, eps, /*per_unit=*/4);
    EXPECT_LT(TotalVariation(Probabilities(dist), oracle), 1e-12);
  }
}

TEST(IntervalDistributionTest, ShiftAndScaleInvariant) {
  const std::vector<double> points = {1, 3, 4, 9};
  std::vector<double> moved;
  for (double x : points) moved.push_back(3.0 * x - 50.0);
  const std::vector<WeightedInterval> a =
      IntervalDistribution(Domain(0, 10), points, 0.4, 1.3).value();
  const std::vector<WeightedInterval> b =
      IntervalDistribution(Domain(-50, -20), moved, 0.4, 1.3).value();
  EXPECT_LT(TotalVariation(Probabilities(a), Probabilities(b)), 1e-14);
}

TEST(IntervalDistributionTest, TargetMassIncreasesWithEpsilon) {
  double previous = 0.0;
  for (double eps : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
    const double p =
        IntervalDistribution(Domain(0, 10), kEvens, 0.5, eps)->at(2)
            .probability;
    EXPECT_GT(p, previous);
    previous = p;
  }
}

TEST(IntervalDistributionTest, RejectsBadArguments) {
  EXPECT_FALSE(IntervalDistribution(Domain(0, 10), kEvens, 0.0, 1.0).ok());
  EXPECT_FALSE(IntervalDistribution(Domain(0, 10), kEvens, 1.0, 1.0).ok());
  EXPECT_FALSE(IntervalDistribution(Domain(0, 10), kEvens, 0.5, -1.0).ok());
  EXPECT_FALSE(
      IntervalDistribution(Domain(0, 10), std::vector<double>{4, 2}, 0.5, 1.0)
          .ok());
  EXPECT_FALSE(
      IntervalDistribution(Domain(0, 10), std::vector<double>{10}, 0.5, 1.0)
          .ok());
}

TEST(BruteForceEmOracleTest, SoftmaxOfHalfEpsilonUtility) {
  const std::vector<double> grid = {1, 2, 3};
  const std::vector<double> u = {0, -1, -2};
  const std::vector<double> p = BruteForceEmOracle(grid, u, 2.0).value();
  const std::vector<double> expected =
      Normalize({1.0, std::exp(-1.0), std::exp(-2.0)});
  EXPECT_LT(TotalVariation(p, expected), 1e-15);
  EXPECT_LT(TotalVariation(BruteForceEmOracle(grid, u, 0.0).value(),
                           {1.0 / 3, 1.0 / 3, 1.0 / 3}),
            1e-15);
  EXPECT_FALSE(BruteForceEmOracle(grid, std::vector<double>{0}, 1.0).ok());
}

TEST(SingleQuantileTest, DrawsMatchIntervalDistribution) {
  const std::vector<double> points = {1, 2, 5, 6, 7};
  const Interval domain = Domain(0, 10);
  const std::vector<WeightedInterval> dist =
      IntervalDistribution(domain, points, 0.5, 1.0).value();
  RandomSource rng(17);
  constexpr int kDraws = 50000;
  std::vector<double> freq(dist.size(), 0.0);
  for (int i = 0; i < kDraws; ++i) {
    const double v = SingleQuantile(domain, points, 0.5, 1.0, rng).value();
    ASSERT_TRUE(domain.Contains(v));
    freq[std::upper_bound(points.begin(), points.end(), v) - points.begin()] +=
        1.0 / kDraws;
  }
  for (size_t i = 0; i < dist.size(); ++i) {
    EXPECT_NEAR(freq[i], dist[i].probability, 4.0 / std::sqrt(kDraws));
  }
}

TEST(SingleQuantileTest, UniformInsideChosenGap) {
  // Only one gap can win at eps = inf; the draw is uniform inside it.
  RandomSource rng(2);
  double sum = 0.0;
  constexpr int kDraws = 20000;
  for (int i = 0; i < kDraws; ++i) {
    const double v = SingleQuantile(Domain(0, 10), kEvens, 0.5, kInf, rng)
                         .value();
    ASSERT_GT(v, 4.0);
    ASSERT_LT(v, 6.0);
    sum += v;
  }
  EXPECT_NEAR(sum / kDraws, 5.0, 5.0 * (2.0 / std::sqrt(12.0 * kDraws)));
}

TEST(SingleQuantileTest, EmptyDataIsUniformOnDomain) {
  RandomSource rng(3);
  int left = 0;
  constexpr int kDraws = 20000;
  for (int i = 0; i < kDraws; ++i) {
    const double v = SingleQuantile(Domain(0, 4), {}, 0.5, 1.0, rng).value();
    ASSERT_TRUE(Domain(0, 4).Contains(v));
    left += v < 1.0;
  }
  EXPECT_NEAR(left / static_cast<double>(kDraws), 0.25,
              4.0 / std::sqrt(kDraws));
}

TEST(SampleQuantileUncheckedTest, ArgmaxReturnsTrueQuantileMidpoint) {
  RandomSource rng(1);
  EXPECT_DOUBLE_EQ(internal::SampleQuantileUnchecked(
                       0, 10, kEvens, 0.5, 1.0,
                       SamplingMode::kArgmaxForTesting, rng),
                   5.0);
  EXPECT_DOUBLE_EQ(internal::SampleQuantileUnchecked(
                       0, 10, kEvens, 0.1, 1.0,
                       SamplingMode::kArgmaxForTesting, rng),
                   1.0);
}

TEST(SampleQuantileUncheckedTest, FarGapsUnderflowSafely) {
  std::vector<double> points;
  for (int i = 1; i <= 2000; ++i) points.push_back(i);
  RandomSource rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double v = internal::SampleQuantileUnchecked(
        0, 2001, points, 0.5, 50.0, SamplingMode::kExponential, rng);
    EXPECT_GT(v, 990.0);
    EXPECT_LT(v, 1011.0);
  }
}

TEST(OutputCellProbabilitiesTest, SumsToOneAndSplitsGaps) {
  const std::vector<double> edges = {0, 1, 3, 5, 10};
  const std::vector<double> cells =
      OutputCellProbabilities(Domain(0, 10), kEvens, 0.5, 0.0, edges).value();
  // eps = 0: output is uniform on the domain.
  EXPECT_LT(TotalVariation(cells, {0.1, 0.2, 0.2, 0.5}), 1e-15);
  EXPECT_FALSE(OutputCellProbabilities(Domain(0, 10), kEvens, 0.5, 1.0,
                                       std::vector<double>{0, 5})
                   .ok());
}

TEST(OutputCellProbabilitiesTest, NeighborRatiosWithinEpsilon) {
  const Interval domain = Domain(0, 8);
  std::vector<double> edges;
  for (int i = 0; i <= 8; ++i) edges.push_back(i);
  const std::vector<double> x = {1.5, 3.5, 6.5};
  const double eps = 0.7;
  for (double extra : {0.5, 2.5, 4.5, 7.5}) {
    std::vector<double> y = x;
    y.push_back(extra);
    std::sort(y.begin(), y.end());
    for (double q : {0.2, 0.5, 0.8}) {
      const std::vector<double> a =
          OutputCellProbabilities(domain, x, q, eps, edges).value();
      const std::vector<double> b =
          OutputCellProbabilities(domain, y, q, eps, edges).value();
      for (size_t c = 0; c < a.size(); ++c) {
        EXPECT_LE(std::abs(std::log(a[c] / b[c])), eps + 1e-9);
      }
    }
  }
}

TEST(GridPointDistributionTest, MatchesOracleOnSameGrid) {
  const std::vector<double> grid = {0.5, 1.5, 3.0, 5.0, 7.0, 9.5};
  std::vector<double> utilities;
  for (double g : grid) {
    utilities.push_back(-std::abs(
        static_cast<double>(dpq::testing::CountBelowByScan(kEvens, g)) - 2.0));
  }
  const std::vector<double> oracle =
      BruteForceEmOracle(grid, utilities, 1.5).value();
  const std::vector<double> got =
      GridPointDistribution(Domain(0, 10), kEvens, 0.5, 1.5, grid).value();
  EXPECT_LT(TotalVariation(got, oracle), 1e-15);
}

}  // namespace
}  // namespace dpq
