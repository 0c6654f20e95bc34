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

#ifndef DPQ_CORE_H_
#define DPQ_CORE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpq {

// Open interval (lo, hi) on the real line with lo < hi.
class Interval {
 public:
  static absl::StatusOr<Interval> Create(double lo, double hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double width() const { return hi_ - lo_; }
  double Midpoint() const { return lo_ + 0.5 * (hi_ - lo_); }

  // True iff lo < x < hi.
  bool Contains(double x) const { return lo_ < x && x < hi_; }

  bool operator==(const Interval&) const = default;

 private:
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {}

  double lo_;
  double hi_;
};

// Strictly increasing sample points, all strictly inside `domain`.
class SortedDataset {
 public:
  // Validates ordering and containment; does not sort or deduplicate (see
  // data.h for the ingestion path that does).
  static absl::StatusOr<SortedDataset> Create(std::vector<double> points,
                                              Interval domain);
  static SortedDataset Empty(Interval domain);

  std::span<const double> points() const { return points_; }
  const Interval& domain() const { return domain_; }
  size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  double operator[](size_t i) const { return points_[i]; }

  // Number of points strictly below `value`.
  size_t CountBelow(double value) const;

  // Smallest spacing between consecutive points, with the domain endpoints
  // acting as sentinels x_0 = lo and x_{n+1} = hi.
  double MinGap() const;

  // domain().width() / MinGap(); always >= size() + 1.
  double Psi() const;

 private:
  SortedDataset(std::vector<double> points, Interval domain)
      : points_(std::move(points)), domain_(domain) {}

  std::vector<double> points_;
  Interval domain_;
};

// Nondecreasing quantile fractions, each strictly inside (0, 1).
class QuantileRequest {
 public:
  static absl::StatusOr<QuantileRequest> Create(std::vector<double> fractions);

  // q_i = i / (m + 1) for i = 1..m.
  static QuantileRequest Uniform(size_t m);

  std::span<const double> fractions() const { return fractions_; }
  size_t size() const { return fractions_.size(); }
  double operator[](size_t i) const { return fractions_[i]; }

 private:
  explicit QuantileRequest(std::vector<double> fractions)
      : fractions_(std::move(fractions)) {}

  std::vector<double> fractions_;
};

enum class PrivacyKind { kPureDp, kZcdp };

// Either a pure epsilon-DP budget or a rho-zCDP budget. An infinite epsilon
// is accepted and denotes the noiseless limit.
class PrivacyBudget {
 public:
  static absl::StatusOr<PrivacyBudget> PureDp(double epsilon);
  static absl::StatusOr<PrivacyBudget> Zcdp(double rho);

  PrivacyKind kind() const { return kind_; }
  double value() const { return value_; }

  // Epsilon for each of `steps` adaptively composed pure-DP mechanisms so that
  // the composition spends exactly this budget: epsilon / steps for pure DP,
  // sqrt(2 rho / steps) for zCDP.
  double SplitEpsilon(int64_t steps) const;

  std::string ToString() const;

 private:
  PrivacyBudget(PrivacyKind kind, double value) : kind_(kind), value_(value) {}

  PrivacyKind kind_;
  double value_;
};

// Budget consumed by sequentially composing pure-DP mechanisms with the given
// epsilons: sum(eps) for pure DP, sum(eps^2 / 2) for zCDP.
absl::StatusOr<PrivacyBudget> ComposedSpend(PrivacyKind kind,
                                            std::span<const double> epsilons);

// Number of levels of the balanced halving recursion on m quantiles,
// floor(log2 m) + 1.
absl::StatusOr<int> Depth(int64_t m);

// Epsilon handed to every single-quantile call of the recursion on m
// quantiles.
absl::StatusOr<double> PerLevelParam(const PrivacyBudget& budget, int64_t m);

// floor(q * n): the number of points below a true q-quantile.
int64_t TargetRank(double q, size_t n);

// Number of points x with min(d1, d2) <= x < max(d1, d2).
size_t Gap(const SortedDataset& x, double d1, double d2);

// Bounds (x_k, x_{k+1}) of the set of true q-quantiles, k = floor(q n), with
// x_0 = domain lo and x_{n+1} = domain hi. Every o in the left-open,
// right-closed range (x_k, x_{k+1}] has exactly k points below it.
absl::StatusOr<Interval> TrueQuantile(const SortedDataset& x, double q);

}  // namespace dpq

#endif  // DPQ_CORE_H_
