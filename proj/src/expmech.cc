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
#include <cstdlib>
#include <limits>

#include "absl/strings/str_cat.h"

namespace dpq {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Below this factor a gap's weight is treated as zero. The largest weight is
// always the target gap's width times 1, so the dropped mass is negligible.
constexpr double kWeightFloor = 1e-300;

absl::Status ValidateInputs(const Interval& domain,
                            std::span<const double> points, double q,
                            double epsilon) {
  if (!(q > 0.0 && q < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Quantile fraction must lie in (0, 1), got ", q));
  }
  if (std::isnan(epsilon) || epsilon < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("Epsilon must be nonnegative, got ", epsilon));
  }
  for (size_t i = 0; i < points.size(); ++i) {
    if (!domain.Contains(points[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("Point ", i, " lies outside the domain"));
    }
    if (i > 0 && !(points[i - 1] < points[i])) {
      return absl::InvalidArgumentError("Points must be strictly increasing");
    }
  }
  return absl::OkStatus();
}

int64_t GapUtility(int64_t points_below, int64_t target) {
  return -std::abs(points_below - target);
}

// (eps / 2) * utility, with the eps = +inf limit mapping utility 0 to 0.
double ScaledUtility(double epsilon, int64_t utility) {
  if (utility == 0) return 0.0;
  return std::isinf(epsilon) ? kNegInf
                             : 0.5 * epsilon * static_cast<double>(utility);
}

// Normalizes log weights with max subtraction.
std::vector<double> Softmax(std::span<const double> log_weights) {
  double max_lw = kNegInf;
  for (double lw : log_weights) max_lw = std::max(max_lw, lw);
  std::vector<double> probs(log_weights.size());
  double total = 0.0;
  for (size_t i = 0; i < log_weights.size(); ++i) {
    probs[i] = std::exp(log_weights[i] - max_lw);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

}  // namespace

absl::StatusOr<std::vector<WeightedInterval>> IntervalDistribution(
    const Interval& domain, std::span<const double> sorted_points, double q,
    double epsilon) {
  if (absl::Status s = ValidateInputs(domain, sorted_points, q, epsilon);
      !s.ok()) {
    return s;
  }
  const size_t n = sorted_points.size();
  const int64_t target = TargetRank(q, n);
  std::vector<WeightedInterval> out(n + 1);
  std::vector<double> log_weights(n + 1);
  for (size_t i = 0; i <= n; ++i) {
    IntervalWeight& w = out[i].interval;
    w.index = i + 1;
    w.lo = i == 0 ? domain.lo() : sorted_points[i - 1];
    w.hi = i == n ? domain.hi() : sorted_points[i];
    w.utility = GapUtility(static_cast<int64_t>(i), target);
    w.log_weight = ScaledUtility(epsilon, w.utility) + std::log(w.hi - w.lo);
    log_weights[i] = w.log_weight;
  }
  const std::vector<double> probs = Softmax(log_weights);
  for (size_t i = 0; i <= n; ++i) out[i].probability = probs[i];
  return out;
}

absl::StatusOr<std::vector<WeightedInterval>> IntervalDistribution(
    const SortedDataset& x, double q, double epsilon) {
  return IntervalDistribution(x.domain(), x.points(), q, epsilon);
}

absl::StatusOr<double> SingleQuantile(const Interval& domain,
                                      std::span<const double> sorted_points,
                                      double q, double epsilon,
                                      RandomSource& rng) {
  if (absl::Status s = ValidateInputs(domain, sorted_points, q, epsilon);
      !s.ok()) {
    return s;
  }
  return internal::SampleQuantileUnchecked(domain.lo(), domain.hi(),
                                           sorted_points, q, epsilon,
                                           SamplingMode::kExponential, rng);
}

absl::StatusOr<double> SingleQuantile(const SortedDataset& x, double q,
                                      double epsilon, RandomSource& rng) {
  return SingleQuantile(x.domain(), x.points(), q, epsilon, rng);
}

absl::StatusOr<std::vector<double>> BruteForceEmOracle(
    std::span<const double> grid, std::span<const double> utilities,
    double epsilon) {
  if (grid.size() != utilities.size() || grid.empty()) {
    return absl::InvalidArgumentError(
        "Grid and utilities must be nonempty and of equal size");
  }
  if (std::isnan(epsilon) || epsilon < 0.0) {
    return absl::InvalidArgumentError("Epsilon must be nonnegative");
  }
  std::vector<double> log_weights(utilities.size());
  if (std::isinf(epsilon)) {
    const double best = *std::max_element(utilities.begin(), utilities.end());
    for (size_t i = 0; i < utilities.size(); ++i) {
      log_weights[i] = utilities[i] == best ? 0.0 : kNegInf;
    }
  } else {
    for (size_t i = 0; i < utilities.size(); ++i) {
      if (!std::isfinite(utilities[i])) {
        return absl::InvalidArgumentError("Utilities must be finite");
      }
      log_weights[i] = 0.5 * epsilon * utilities[i];
    }
  }
  return Softmax(log_weights);
}

absl::StatusOr<std::vector<double>> OutputCellProbabilities(
    const Interval& domain, std::span<const double> sorted_points, double q,
    double epsilon, std::span<const double> edges) {
  if (edges.size() < 2 || edges.front() != domain.lo() ||
      edges.back() != domain.hi()) {
    return absl::InvalidArgumentError("Cell edges must span the domain");
  }
  for (size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i - 1] < edges[i])) {
      return absl::InvalidArgumentError("Cell edges must be increasing");
    }
  }
  absl::StatusOr<std::vector<WeightedInterval>> dist =
      IntervalDistribution(domain, sorted_points, q, epsilon);
  if (!dist.ok()) return dist.status();

  std::vector<double> cells(edges.size() - 1, 0.0);
  size_t c = 0;
  for (const WeightedInterval& wi : *dist) {
    const double density = wi.probability / (wi.interval.hi - wi.interval.lo);
    while (c + 1 < edges.size() && edges[c + 1] <= wi.interval.lo) ++c;
    for (size_t j = c; j + 1 < edges.size() && edges[j] < wi.interval.hi;
         ++j) {
      const double overlap = std::min(edges[j + 1], wi.interval.hi) -
                             std::max(edges[j], wi.interval.lo);
      if (overlap > 0.0) cells[j] += density * overlap;
    }
  }
  return cells;
}

absl::StatusOr<std::vector<double>> GridPointDistribution(
    const Interval& domain, std::span<const double> sorted_points, double q,
    double epsilon, std::span<const double> grid) {
  if (absl::Status s = ValidateInputs(domain, sorted_points, q, epsilon);
      !s.ok()) {
    return s;
  }
  if (grid.empty()) return absl::InvalidArgumentError("Empty grid");
  const int64_t target = TargetRank(q, sorted_points.size());
  std::vector<double> log_weights(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!domain.Contains(grid[i])) {
      return absl::InvalidArgumentError("Grid point outside the domain");
    }
    const auto below = static_cast<int64_t>(
        std::lower_bound(sorted_points.begin(), sorted_points.end(), grid[i]) -
        sorted_points.begin());
    log_weights[i] = ScaledUtility(epsilon, GapUtility(below, target));
  }
  return Softmax(log_weights);
}

namespace internal {

double SampleQuantileUnchecked(double lo, double hi,
                               std::span<const double> sorted_points, double q,
                               double epsilon, SamplingMode mode,
                               RandomSource& rng) {
  const size_t n = sorted_points.size();
  const auto target = static_cast<size_t>(TargetRank(q, n));
  auto gap_lo = [&](size_t i) { return i == 0 ? lo : sorted_points[i - 1]; };
  auto gap_hi = [&](size_t i) { return i == n ? hi : sorted_points[i]; };

  size_t chosen = target;
  if (mode == SamplingMode::kExponential) {
    // The target gap has utility 0, the maximum, so exp(eps * u / 2) is
    // already max-normalized: gap i carries width_i * r^|i - target|.
    const double ratio = std::exp(-0.5 * epsilon);
    std::vector<double> weights(n + 1, 0.0);
    weights[target] = gap_hi(target) - gap_lo(target);
    double factor = 1.0;
    for (size_t i = target; i-- > 0;) {
      factor *= ratio;
      if (factor < kWeightFloor) break;
      weights[i] = factor * (gap_hi(i) - gap_lo(i));
    }
    factor = 1.0;
    for (size_t i = target + 1; i <= n; ++i) {
      factor *= ratio;
      if (factor < kWeightFloor) break;
      weights[i] = factor * (gap_hi(i) - gap_lo(i));
    }
    double total = 0.0;
    for (double w : weights) total += w;
    const double threshold = rng.Uniform() * total;
    double cumulative = 0.0;
    chosen = n + 1;
    for (size_t i = 0; i <= n; ++i) {
      cumulative += weights[i];
      if (cumulative > threshold) {
        chosen = i;
        break;
      }
    }
    if (chosen == n + 1) {
      // Rounding left the threshold past the last partial sum.
      chosen = n;
      while (weights[chosen] == 0.0) --chosen;
    }
  }

  const double a = gap_lo(chosen);
  const double b = gap_hi(chosen);
  double v = mode == SamplingMode::kExponential
                 ? a + rng.OpenUniform() * (b - a)
                 : a + 0.5 * (b - a);
  if (!(lo < v && v < hi)) v = lo + 0.5 * (hi - lo);
  return v;
}

}  // namespace internal
}  // namespace dpq
