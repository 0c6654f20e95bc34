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
#ifndef DPQ_AQ_H_
#define DPQ_AQ_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpq/core.h"
#include "dpq/expmech.h"
#include "dpq/random.h"

namespace dpq {

// Renormalized fractions are clamped into [kFractionClamp, 1 - kFractionClamp]
// so that equal neighboring fractions stay inside (0, 1).
inline constexpr double kFractionClamp = 1e-9;

struct AqOptions {
  // Keep one AqNode per mechanism call in AqResult::tree.
  bool record_tree = false;
  SamplingMode sampling = SamplingMode::kExponential;
};

// One single-quantile call of the recursion. Level i holds positions
// 1..2^(i-1); the children of (i, j) are (i+1, 2j-1) and (i+1, 2j).
struct AqNode {
  int level;
  int64_t position;
  double lo;
  double hi;
  double normalized_q;
  double value;
  double epsilon;
  // The subproblem's data is X[data_begin, data_end).
  size_t data_begin;
  size_t data_end;
  size_t output_index;
};

struct AqResult {
  std::vector<double> estimates;  // aligned with the request's fractions
  std::vector<AqNode> tree;
  PrivacyBudget budget_spent;
};

// A node of the recursion before its pivot is drawn: the open range (lo, hi),
// the slice of the full dataset inside it and the renormalized fractions.
struct Subproblem {
  double lo;
  double hi;
  size_t data_begin;
  size_t data_end;
  std::vector<double> fractions;
};

struct PivotSplit {
  Subproblem left;
  Subproblem right;
};

// Index of the fraction estimated at a node with m fractions: ceil(m/2) - 1.
size_t PivotIndex(size_t m);

// Splits `parent` at the estimate v of its pivot fraction p. The left child
// keeps (lo, v), the points x < v and fractions q / p; the right child keeps
// (v, hi), the points x > v and fractions (q - p) / (1 - p). `all_points` is
// the full sorted dataset that the data ranges index into.
PivotSplit SplitAtPivot(std::span<const double> all_points,
                        const Subproblem& parent, double v);

// Recursive private quantiles: estimates the middle fraction with the
// exponential mechanism at PerLevelParam(budget, m), splits data and
// fractions at the estimate and recurses on both sides. Each point reaches
// one node per level, so the spend composes over Depth(m) levels only.
absl::StatusOr<AqResult> ApproximateQuantiles(const SortedDataset& x,
                                              const QuantileRequest& request,
                                              const PrivacyBudget& budget,
                                              RandomSource& rng,
                                              const AqOptions& options = {});

// Fractions i/n for i < n and (2n - 1) / (2n) in place of the out-of-range
// q_n = 1, which keeps n - 1 points below the last estimate.
std::vector<double> SanitizationFractions(size_t n);

// Private surrogate dataset of the same size: the recursion run on
// SanitizationFractions(n).
absl::StatusOr<std::vector<double>> Sanitize(const SortedDataset& x,
                                             const PrivacyBudget& budget,
                                             RandomSource& rng,
                                             const AqOptions& options = {});

// max_j | |{x < v_j}| - floor(q_j n) |
absl::StatusOr<int64_t> ErrMax(const SortedDataset& x,
                               const QuantileRequest& request,
                               std::span<const double> estimates);

// mean_j | |{x < v_j}| - floor(q_j n) |
absl::StatusOr<double> AverageGap(const SortedDataset& x,
                                  const QuantileRequest& request,
                                  std::span<const double> estimates);

}  // namespace dpq

#endif  // DPQ_AQ_H_
