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
#include <cstdlib>

#include "absl/strings/str_cat.h"

namespace dpq {
namespace {

double ClampFraction(double q) {
  return std::clamp(q, kFractionClamp, 1.0 - kFractionClamp);
}

class Recursion {
 public:
  Recursion(std::span<const double> points, double epsilon, RandomSource& rng,
            const AqOptions& options, size_t m)
      : points_(points),
        epsilon_(epsilon),
        rng_(rng),
        options_(options),
        estimates_(m) {}

  // Depth-first, left child first; the draw order is part of the seeded
  // output.
  void Solve(const Subproblem& sub, int level, int64_t position,
             size_t offset) {
    const size_t m = sub.fractions.size();
    if (m == 0) return;
    const size_t pivot = PivotIndex(m);
    const double v = internal::SampleQuantileUnchecked(
        sub.lo, sub.hi,
        points_.subspan(sub.data_begin, sub.data_end - sub.data_begin),
        sub.fractions[pivot], epsilon_, options_.sampling, rng_);
    estimates_[offset + pivot] = v;
    levels_used_ = std::max(levels_used_, level);
    if (options_.record_tree) {
      tree_.push_back(AqNode{level, position, sub.lo, sub.hi,
                             sub.fractions[pivot], v, epsilon_,
                             sub.data_begin, sub.data_end, offset + pivot});
    }
    if (m == 1) return;
    const PivotSplit split = SplitAtPivot(points_, sub, v);
    Solve(split.left, level + 1, 2 * position - 1, offset);
    Solve(split.right, level + 1, 2 * position, offset + pivot + 1);
  }

  std::vector<double>& estimates() { return estimates_; }
  std::vector<AqNode>& tree() { return tree_; }
  int levels_used() const { return levels_used_; }

 private:
  std::span<const double> points_;
  double epsilon_;
  RandomSource& rng_;
  const AqOptions& options_;
  std::vector<double> estimates_;
  std::vector<AqNode> tree_;
  int levels_used_ = 0;
};

}  // namespace

size_t PivotIndex(size_t m) { return (m + 1) / 2 - 1; }

PivotSplit SplitAtPivot(std::span<const double> all_points,
                        const Subproblem& parent, double v) {
  const size_t m = parent.fractions.size();
  const size_t pivot = PivotIndex(m);
  const double p = parent.fractions[pivot];

  const auto first = all_points.begin() + parent.data_begin;
  const auto last = all_points.begin() + parent.data_end;
  const auto below_end = std::lower_bound(first, last, v);
  const auto above_begin = std::upper_bound(below_end, last, v);

  PivotSplit split;
  split.left.lo = parent.lo;
  split.left.hi = v;
  split.left.data_begin = parent.data_begin;
  split.left.data_end = static_cast<size_t>(below_end - all_points.begin());
  split.left.fractions.reserve(pivot);
  for (size_t j = 0; j < pivot; ++j) {
    split.left.fractions.push_back(ClampFraction(parent.fractions[j] / p));
  }

  split.right.lo = v;
  split.right.hi = parent.hi;
  split.right.data_begin =
      static_cast<size_t>(above_begin - all_points.begin());
  split.right.data_end = parent.data_end;
  split.right.fractions.reserve(m - pivot - 1);
  for (size_t j = pivot + 1; j < m; ++j) {
    split.right.fractions.push_back(
        ClampFraction((parent.fractions[j] - p) / (1.0 - p)));
  }
  return split;
}

absl::StatusOr<AqResult> ApproximateQuantiles(const SortedDataset& x,
                                              const QuantileRequest& request,
                                              const PrivacyBudget& budget,
                                              RandomSource& rng,
                                              const AqOptions& options) {
  const auto m = static_cast<int64_t>(request.size());
  absl::StatusOr<int> depth = Depth(m);
  if (!depth.ok()) return depth.status();
  const double epsilon = budget.SplitEpsilon(*depth);

  Subproblem root{x.domain().lo(), x.domain().hi(), 0, x.size(),
                  std::vector<double>(request.fractions().begin(),
                                      request.fractions().end())};
  Recursion recursion(x.points(), epsilon, rng, options, request.size());
  recursion.Solve(root, /*level=*/1, /*position=*/1, /*offset=*/0);

  // Nodes on one level see disjoint data, so each level is charged once.
  const std::vector<double> level_epsilons(recursion.levels_used(), epsilon);
  absl::StatusOr<PrivacyBudget> spent =
      ComposedSpend(budget.kind(), level_epsilons);
  if (!spent.ok()) return spent.status();

  return AqResult{std::move(recursion.estimates()), std::move(recursion.tree()),
                  *spent};
}

std::vector<double> SanitizationFractions(size_t n) {
  std::vector<double> fractions(n);
  const double dn = static_cast<double>(n);
  for (size_t i = 1; i < n; ++i) {
    fractions[i - 1] = static_cast<double>(i) / dn;
  }
  if (n > 0) fractions[n - 1] = (2.0 * dn - 1.0) / (2.0 * dn);
  return fractions;
}

absl::StatusOr<std::vector<double>> Sanitize(const SortedDataset& x,
                                             const PrivacyBudget& budget,
                                             RandomSource& rng,
                                             const AqOptions& options) {
  if (x.empty()) {
    return absl::InvalidArgumentError("Sanitize requires a nonempty dataset");
  }
  absl::StatusOr<QuantileRequest> request =
      QuantileRequest::Create(SanitizationFractions(x.size()));
  if (!request.ok()) return request.status();
  absl::StatusOr<AqResult> result =
      ApproximateQuantiles(x, *request, budget, rng, options);
  if (!result.ok()) return result.status();
  return std::move(result->estimates);
}

namespace {

absl::StatusOr<std::vector<int64_t>> PerQuantileGaps(
    const SortedDataset& x, const QuantileRequest& request,
    std::span<const double> estimates) {
  if (estimates.size() != request.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Expected ", request.size(), " estimates, got ",
                     estimates.size()));
  }
  std::vector<int64_t> gaps(estimates.size());
  for (size_t j = 0; j < estimates.size(); ++j) {
    gaps[j] = std::abs(static_cast<int64_t>(x.CountBelow(estimates[j])) -
                       TargetRank(request[j], x.size()));
  }
  return gaps;
}

}  // namespace

absl::StatusOr<int64_t> ErrMax(const SortedDataset& x,
                               const QuantileRequest& request,
                               std::span<const double> estimates) {
  absl::StatusOr<std::vector<int64_t>> gaps =
      PerQuantileGaps(x, request, estimates);
  if (!gaps.ok()) return gaps.status();
  return *std::max_element(gaps->begin(), gaps->end());
}

absl::StatusOr<double> AverageGap(const SortedDataset& x,
                                  const QuantileRequest& request,
                                  std::span<const double> estimates) {
  absl::StatusOr<std::vector<int64_t>> gaps =
      PerQuantileGaps(x, request, estimates);
  if (!gaps.ok()) return gaps.status();
  double total = 0.0;
  for (int64_t g : *gaps) total += static_cast<double>(g);
  return total / static_cast<double>(gaps->size());
}

}  // namespace dpq
