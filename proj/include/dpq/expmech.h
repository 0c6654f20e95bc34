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
#ifndef DPQ_EXPMECH_H_
#define DPQ_EXPMECH_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpq/core.h"
#include "dpq/random.h"

namespace dpq {

// One of the n+1 gaps [x_{k-1}, x_k) between consecutive data points (with
// the domain endpoints as sentinels). `utility` is -|(k-1) - floor(q n)|: the
// k-1 points below the gap against the target rank.
struct IntervalWeight {
  size_t index;  // k, 1-based.
  double lo;
  double hi;
  int64_t utility;
  double log_weight;  // (eps / 2) * utility + ln(hi - lo)
};

struct WeightedInterval {
  IntervalWeight interval;
  double probability;
};

enum class SamplingMode {
  kExponential,
  // Deterministic noiseless limit: the maximum-utility gap (the true quantile
  // gap), returning its midpoint. Test-only; not differentially private.
  kArgmaxForTesting,
};

// Exact sampling distribution of the single-quantile exponential mechanism
// over the gaps of `sorted_points` inside `domain`, normalized in log space.
// epsilon may be 0 (width-only weights) or +inf (mass on the true quantile
// gap). With no points the single gap is the whole domain.
absl::StatusOr<std::vector<WeightedInterval>> IntervalDistribution(
    const Interval& domain, std::span<const double> sorted_points, double q,
    double epsilon);
absl::StatusOr<std::vector<WeightedInterval>> IntervalDistribution(
    const SortedDataset& x, double q, double epsilon);

// Samples an estimate of the q-quantile of `sorted_points` from the density
// proportional to exp(eps * u(X, w) / 2) on the open domain: a gap drawn from
// IntervalDistribution, then a uniform point inside it.
absl::StatusOr<double> SingleQuantile(const Interval& domain,
                                      std::span<const double> sorted_points,
                                      double q, double epsilon,
                                      RandomSource& rng);
absl::StatusOr<double> SingleQuantile(const SortedDataset& x, double q,
                                      double epsilon, RandomSource& rng);

// Softmax of eps * u / 2 over a finite candidate set (sensitivity 1).
absl::StatusOr<std::vector<double>> BruteForceEmOracle(
    std::span<const double> grid, std::span<const double> utilities,
    double epsilon);

// Probability that the mechanism's output falls in each cell
// [edges[i], edges[i+1]). `edges` must be increasing and span the domain.
absl::StatusOr<std::vector<double>> OutputCellProbabilities(
    const Interval& domain, std::span<const double> sorted_points, double q,
    double epsilon, std::span<const double> edges);

// Mechanism density evaluated at each grid point, renormalized over the grid.
absl::StatusOr<std::vector<double>> GridPointDistribution(
    const Interval& domain, std::span<const double> sorted_points, double q,
    double epsilon, std::span<const double> grid);

namespace internal {

// SingleQuantile without argument validation. `sorted_points` must be strictly
// increasing inside (lo, hi); epsilon >= 0. The result is strictly inside
// (lo, hi) whenever the domain holds a representable interior point.
double SampleQuantileUnchecked(double lo, double hi,
                               std::span<const double> sorted_points, double q,
                               double epsilon, SamplingMode mode,
                               RandomSource& rng);

}  // namespace internal
}  // namespace dpq

#endif  // DPQ_EXPMECH_H_
