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
#include "dpq/aq.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "absl/status/status.h"
#include "dpq/core.h"
#include "dpq/random.h"
#include "test_oracles.h"

namespace dpq {
namespace {

using ::testing::DoubleEq;
using ::testing::DoubleNear;
using ::testing::ElementsAre;
using ::testing::SizeIs;

constexpr double kInf = std::numeric_limits<double>::infinity();

Interval Domain(double lo, double hi) { return Interval::Create(lo, hi).value(); }

SortedDataset Data(std::vector<double> points, double lo, double hi) {
  return SortedDataset::Create(std::move(points), Domain(lo, hi)).value();
}

SortedDataset EvenlySpaced(size_t n, double lo, double hi) {
  std::vector<double> points;
  for (size_t i = 1; i <= n; ++i) {
    points.push_back(lo + (hi - lo) * static_cast<double>(i) / (n + 1.0));
  }
  return Data(points, lo, hi);
}

SortedDataset RandomData(size_t n, uint64_t seed) {
  RandomSource rng(seed);
  std::vector<double> points;
  for (size_t i = 0; i < n; ++i) points.push_back(-50.0 + 100.0 * rng.OpenUniform());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return Data(points, -100, 100);
}

AqOptions Recorded(SamplingMode mode = SamplingMode::kExponential) {
  AqOptions options;
  options.record_tree = true;
  options.sampling = mode;
  return options;
}

const PrivacyBudget kEpsOne = PrivacyBudget::PureDp(1.0).value();

TEST(PivotIndexTest, CeilHalfMinusOne) {
  EXPECT_EQ(PivotIndex(1), 0u);
  EXPECT_EQ(PivotIndex(2), 0u);
  EXPECT_EQ(PivotIndex(3), 1u);
  EXPECT_EQ(PivotIndex(4), 1u);
  EXPECT_EQ(PivotIndex(7), 3u);
}

TEST(SplitAtPivotTest, RenormalizesAndSplitsData) {
  const std::vector<double> points = {1, 2, 3, 4, 5, 6};
  const Subproblem parent{0, 7, 0, 6, {0.2, 0.4, 0.6, 0.8}};
  const PivotSplit split = SplitAtPivot(points, parent, 3.0);
  EXPECT_DOUBLE_EQ(split.left.lo, 0.0);
  EXPECT_DOUBLE_EQ(split.left.hi, 3.0);
  EXPECT_EQ(split.left.data_begin, 0u);
  EXPECT_EQ(split.left.data_end, 2u);
  EXPECT_THAT(split.left.fractions, ElementsAre(DoubleEq(0.5)));
  // The pivot point 3 itself goes to neither side.
  EXPECT_EQ(split.right.data_begin, 3u);
  EXPECT_EQ(split.right.data_end, 6u);
  EXPECT_THAT(split.right.fractions,
              ElementsAre(DoubleNear(1.0 / 3, 1e-15), DoubleNear(2.0 / 3, 1e-15)));
}

TEST(SplitAtPivotTest, EqualFractionsAreClamped) {
  const std::vector<double> points = {1, 2};
  const Subproblem parent{0, 3, 0, 2, {0.5, 0.5, 0.5}};
  const PivotSplit split = SplitAtPivot(points, parent, 1.5);
  EXPECT_THAT(split.left.fractions, ElementsAre(DoubleEq(1.0 - kFractionClamp)));
  EXPECT_THAT(split.right.fractions, ElementsAre(DoubleEq(kFractionClamp)));
}

TEST(ApproximateQuantilesTest, SingleQuantileIsOneFullCall) {
  const SortedDataset x = EvenlySpaced(20, 0, 1);
  RandomSource rng(1);
  const AqResult r =
      ApproximateQuantiles(x, QuantileRequest::Create({0.3}).value(), kEpsOne,
                           rng, Recorded())
          .value();
  ASSERT_THAT(r.tree, SizeIs(1));
  EXPECT_EQ(r.tree[0].level, 1);
  EXPECT_DOUBLE_EQ(r.tree[0].epsilon, 1.0);
  EXPECT_DOUBLE_EQ(r.tree[0].lo, 0.0);
  EXPECT_DOUBLE_EQ(r.tree[0].hi, 1.0);
  EXPECT_EQ(r.tree[0].data_end - r.tree[0].data_begin, 20u);
  EXPECT_EQ(r.estimates, std::vector<double>{r.tree[0].value});
}

TEST(ApproximateQuantilesTest, QuartilesChildrenSeeOneHalf) {
  const SortedDataset x = RandomData(200, 4);
  RandomSource rng(2);
  const AqResult r =
      ApproximateQuantiles(x, QuantileRequest::Uniform(3), kEpsOne, rng,
                           Recorded())
          .value();
  ASSERT_THAT(r.tree, SizeIs(3));
  for (const AqNode& node : r.tree) {
    EXPECT_NEAR(node.normalized_q, 0.5, 1e-15);
    EXPECT_DOUBLE_EQ(node.epsilon, 0.5);
  }
}

TEST(ApproximateQuantilesTest, TreeShapeAndPartition) {
  const SortedDataset x = RandomData(500, 7);
  for (size_t m : {1, 2, 5, 8, 15, 16, 33, 120}) {
    RandomSource rng(m);
    const AqResult r =
        ApproximateQuantiles(x, QuantileRequest::Uniform(m), kEpsOne, rng,
                             Recorded())
            .value();
    ASSERT_EQ(r.tree.size(), m);
    std::map<int, std::vector<const AqNode*>> levels;
    std::map<std::pair<int, int64_t>, const AqNode*> by_position;
    std::vector<bool> output_seen(m, false);
    for (const AqNode& node : r.tree) {
      levels[node.level].push_back(&node);
      by_position[{node.level, node.position}] = &node;
      EXPECT_GE(node.position, 1);
      EXPECT_LE(node.position, int64_t{1} << (node.level - 1));
      EXPECT_GT(node.normalized_q, 0.0);
      EXPECT_LT(node.normalized_q, 1.0);
      EXPECT_DOUBLE_EQ(r.estimates[node.output_index], node.value);
      output_seen[node.output_index] = true;
    }
    EXPECT_EQ(std::count(output_seen.begin(), output_seen.end(), true),
              static_cast<long>(m));
    EXPECT_EQ(static_cast<int>(levels.size()),
              Depth(static_cast<int64_t>(m)).value());
    for (auto& [level, nodes] : levels) {
      std::sort(nodes.begin(), nodes.end(),
                [](const AqNode* a, const AqNode* b) { return a->lo < b->lo; });
      for (size_t k = 1; k < nodes.size(); ++k) {
        // Disjoint intervals and disjoint data slices on one level.
        EXPECT_LE(nodes[k - 1]->hi, nodes[k]->lo);
        EXPECT_LE(nodes[k - 1]->data_end, nodes[k]->data_begin);
      }
      for (const AqNode* node : nodes) {
        for (size_t i = node->data_begin; i < node->data_end; ++i) {
          EXPECT_GT(x[i], node->lo);
          EXPECT_LT(x[i], node->hi);
        }
      }
    }
    // Children cut the parent's interval at its value.
    for (const AqNode& node : r.tree) {
      if (node.level == 1) continue;
      const AqNode* parent =
          by_position.at({node.level - 1, (node.position + 1) / 2});
      if (node.position % 2 == 1) {
        EXPECT_EQ(node.lo, parent->lo);
        EXPECT_EQ(node.hi, parent->value);
      } else {
        EXPECT_EQ(node.lo, parent->value);
        EXPECT_EQ(node.hi, parent->hi);
      }
    }
    // Data not inside some node of a level is exactly the earlier pivots'
    // neighborhood: every point is in at most one node per level.
    for (auto& [level, nodes] : levels) {
      size_t covered = 0;
      for (const AqNode* node : nodes) covered += node->data_end - node->data_begin;
      EXPECT_LE(covered, x.size());
    }
  }
}

TEST(ApproximateQuantilesTest, EstimatesNondecreasingAndInside) {
  const SortedDataset x = RandomData(300, 11);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    RandomSource rng(seed);
    const AqResult r =
        ApproximateQuantiles(x, QuantileRequest::Uniform(40), kEpsOne, rng)
            .value();
    ASSERT_EQ(r.estimates.size(), 40u);
    EXPECT_TRUE(std::is_sorted(r.estimates.begin(), r.estimates.end()));
    for (double v : r.estimates) EXPECT_TRUE(x.domain().Contains(v));
  }
}

TEST(ApproximateQuantilesTest, EqualFractionsStayOrdered) {
  const SortedDataset x = RandomData(100, 3);
  RandomSource rng(4);
  const QuantileRequest request =
      QuantileRequest::Create({0.5, 0.5, 0.5, 0.5, 0.9}).value();
  const AqResult r = ApproximateQuantiles(x, request, kEpsOne, rng).value();
  EXPECT_TRUE(std::is_sorted(r.estimates.begin(), r.estimates.end()));
}

TEST(ApproximateQuantilesTest, ArgmaxNodesHitTrueQuantileOfSubproblem) {
  const SortedDataset x = RandomData(257, 21);
  for (size_t m : {1, 3, 7, 10, 31, 64}) {
    RandomSource rng(0);
    const AqResult r =
        ApproximateQuantiles(x, QuantileRequest::Uniform(m), kEpsOne, rng,
                             Recorded(SamplingMode::kArgmaxForTesting))
            .value();
    for (const AqNode& node : r.tree) {
      const size_t k = node.data_end - node.data_begin;
      const auto below = static_cast<int64_t>(
          std::lower_bound(x.points().begin() + node.data_begin,
                           x.points().begin() + node.data_end, node.value) -
          (x.points().begin() + node.data_begin));
      EXPECT_EQ(below, TargetRank(node.normalized_q, k));
    }
    // Each level can round the target down by at most one point.
    EXPECT_LE(ErrMax(x, QuantileRequest::Uniform(m), r.estimates).value(),
              Depth(static_cast<int64_t>(m)).value());
  }
}

TEST(ApproximateQuantilesTest, InfiniteBudgetIsExactOnDyadicSizes) {
  // n + 1 = 64 and m = 7: every renormalized target rank is an integer.
  const SortedDataset x = RandomData(63, 5);
  ASSERT_EQ(x.size(), 63u);
  const QuantileRequest request =
      QuantileRequest::Create({1.0 / 8, 2.0 / 8, 3.0 / 8, 4.0 / 8, 5.0 / 8,
                               6.0 / 8, 7.0 / 8})
          .value();
  RandomSource rng(1);
  const AqResult r = ApproximateQuantiles(
                         x, request, PrivacyBudget::PureDp(kInf).value(), rng)
                         .value();
  EXPECT_LE(ErrMax(x, request, r.estimates).value(), 1);
}

TEST(ApproximateQuantilesTest, BudgetSpentEqualsBudget) {
  const SortedDataset x = RandomData(50, 1);
  for (int64_t m = 1; m <= 120; ++m) {
    for (const PrivacyBudget& budget :
         {PrivacyBudget::PureDp(1.0).value(), PrivacyBudget::Zcdp(0.5).value()}) {
      RandomSource rng(m);
      const AqResult r =
          ApproximateQuantiles(x, QuantileRequest::Uniform(m), budget, rng)
              .value();
      EXPECT_EQ(r.budget_spent.kind(), budget.kind());
      EXPECT_NEAR(r.budget_spent.value(), budget.value(), 1e-15) << m;
    }
  }
}

TEST(ApproximateQuantilesTest, SameSeedSameOutput) {
  const SortedDataset x = RandomData(100, 1);
  RandomSource a(99);
  RandomSource b(99);
  EXPECT_EQ(
      ApproximateQuantiles(x, QuantileRequest::Uniform(9), kEpsOne, a)->estimates,
      ApproximateQuantiles(x, QuantileRequest::Uniform(9), kEpsOne, b)->estimates);
}

TEST(ApproximateQuantilesTest, EmptyDataStillReturnsOrderedEstimates) {
  RandomSource rng(1);
  const AqResult r =
      ApproximateQuantiles(SortedDataset::Empty(Domain(-1, 1)),
                           QuantileRequest::Uniform(5), kEpsOne, rng)
          .value();
  EXPECT_TRUE(std::is_sorted(r.estimates.begin(), r.estimates.end()));
  for (double v : r.estimates) EXPECT_TRUE(Domain(-1, 1).Contains(v));
}

TEST(SanitizationFractionsTest, Examples) {
  EXPECT_THAT(SanitizationFractions(1), ElementsAre(DoubleEq(0.5)));
  EXPECT_THAT(SanitizationFractions(4),
              ElementsAre(DoubleEq(0.25), DoubleEq(0.5), DoubleEq(0.75),
                          DoubleEq(0.875)));
}

TEST(SanitizeTest, InfiniteBudgetTracksRanks) {
  const SortedDataset x = Data({1, 2, 3, 4}, 0, 5);
  const QuantileRequest request =
      QuantileRequest::Create(SanitizationFractions(4)).value();
  for (uint64_t seed = 0; seed < 20; ++seed) {
    RandomSource rng(seed);
    const std::vector<double> out =
        Sanitize(x, PrivacyBudget::PureDp(kInf).value(), rng).value();
    ASSERT_EQ(out.size(), 4u);
    EXPECT_TRUE(std::is_sorted(out.begin(), out.end()));
    EXPECT_EQ(ErrMax(x, request, out).value(), 0);
    // floor(q_l n) real points lie below the l-th surrogate: 1, 2, 3, 3.
    EXPECT_EQ(x.CountBelow(out[0]), 1u);
    EXPECT_EQ(x.CountBelow(out[1]), 2u);
    EXPECT_EQ(x.CountBelow(out[2]), 3u);
    EXPECT_EQ(x.CountBelow(out[3]), 3u);
  }
}

TEST(SanitizeTest, RejectsEmpty) {
  RandomSource rng(1);
  EXPECT_FALSE(Sanitize(SortedDataset::Empty(Domain(0, 1)), kEpsOne, rng).ok());
}

TEST(ErrMaxTest, Examples) {
  const SortedDataset x = Data({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0, 11);
  const QuantileRequest median = QuantileRequest::Create({0.5}).value();
  EXPECT_EQ(ErrMax(x, median, std::vector<double>{3.5}).value(), 2);
  EXPECT_EQ(ErrMax(x, median, std::vector<double>{5.5}).value(), 0);
  const QuantileRequest three = QuantileRequest::Uniform(3);
  // floor(2.5) = 2, 5, floor(7.5) = 7 points below each true quantile.
  EXPECT_EQ(ErrMax(x, three, std::vector<double>{2.5, 5.5, 7.5}).value(), 0);
  EXPECT_EQ(ErrMax(x, three, std::vector<double>{0.5, 5.5, 10.5}).value(), 3);
  EXPECT_DOUBLE_EQ(
      AverageGap(x, three, std::vector<double>{0.5, 5.5, 10.5}).value(),
      5.0 / 3.0);
  EXPECT_FALSE(ErrMax(x, three, std::vector<double>{1.0}).ok());
}

}  // namespace
}  // namespace dpq
