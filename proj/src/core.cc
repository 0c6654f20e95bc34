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

#include "dpq/core.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace dpq {

absl::StatusOr<Interval> Interval::Create(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    return absl::InvalidArgumentError("Interval endpoints must be finite");
  }
  if (!(lo < hi)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Interval requires lo < hi, got (", lo, ", ", hi, ")"));
  }
  return Interval(lo, hi);
}

absl::StatusOr<SortedDataset> SortedDataset::Create(std::vector<double> points,
                                                    Interval domain) {
  for (size_t i = 0; i < points.size(); ++i) {
    if (!domain.Contains(points[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("Point ", i, " = ", points[i], " is not inside (",
                       domain.lo(), ", ", domain.hi(), ")"));
    }
    if (i > 0 && !(points[i - 1] < points[i])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Points must be strictly increasing; violated at index ", i));
    }
  }
  return SortedDataset(std::move(points), domain);
}

SortedDataset SortedDataset::Empty(Interval domain) {
  return SortedDataset({}, domain);
}

size_t SortedDataset::CountBelow(double value) const {
  return static_cast<size_t>(
      std::lower_bound(points_.begin(), points_.end(), value) -
      points_.begin());
}

double SortedDataset::MinGap() const {
  double prev = domain_.lo();
  double min_gap = std::numeric_limits<double>::infinity();
  for (double x : points_) {
    min_gap = std::min(min_gap, x - prev);
    prev = x;
  }
  return std::min(min_gap, domain_.hi() - prev);
}

double SortedDataset::Psi() const { return domain_.width() / MinGap(); }

absl::StatusOr<QuantileRequest> QuantileRequest::Create(
    std::vector<double> fractions) {
  if (fractions.empty()) {
    return absl::InvalidArgumentError("At least one quantile is required");
  }
  for (size_t i = 0; i < fractions.size(); ++i) {
    const double q = fractions[i];
    if (!(q > 0.0 && q < 1.0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Quantile fractions must lie in (0, 1); got ", q, " at index ", i));
    }
    if (i > 0 && fractions[i - 1] > q) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Quantile fractions must be nondecreasing; violated at index ", i));
    }
  }
  return QuantileRequest(std::move(fractions));
}

QuantileRequest QuantileRequest::Uniform(size_t m) {
  std::vector<double> fractions(m);
  for (size_t i = 0; i < m; ++i) {
    fractions[i] = static_cast<double>(i + 1) / static_cast<double>(m + 1);
  }
  return QuantileRequest(std::move(fractions));
}

absl::StatusOr<PrivacyBudget> PrivacyBudget::PureDp(double epsilon) {
  if (std::isnan(epsilon) || !(epsilon > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Epsilon must be positive, got ", epsilon));
  }
  return PrivacyBudget(PrivacyKind::kPureDp, epsilon);
}

absl::StatusOr<PrivacyBudget> PrivacyBudget::Zcdp(double rho) {
  if (std::isnan(rho) || !(rho > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Rho must be positive, got ", rho));
  }
  return PrivacyBudget(PrivacyKind::kZcdp, rho);
}

double PrivacyBudget::SplitEpsilon(int64_t steps) const {
  const double k = static_cast<double>(steps);
  switch (kind_) {
    case PrivacyKind::kPureDp:
      return value_ / k;
    case PrivacyKind::kZcdp:
      return std::sqrt(2.0 * value_ / k);
  }
  return 0.0;
}

std::string PrivacyBudget::ToString() const {
  return kind_ == PrivacyKind::kPureDp ? absl::StrCat("PureDp(", value_, ")")
                                       : absl::StrCat("Zcdp(", value_, ")");
}

absl::StatusOr<PrivacyBudget> ComposedSpend(PrivacyKind kind,
                                            std::span<const double> epsilons) {
  double total = 0.0;
  for (double eps : epsilons) {
    if (std::isnan(eps) || eps < 0.0) {
      return absl::InvalidArgumentError("Epsilons must be nonnegative");
    }
    total += kind == PrivacyKind::kPureDp ? eps : 0.5 * eps * eps;
  }
  return kind == PrivacyKind::kPureDp ? PrivacyBudget::PureDp(total)
                                      : PrivacyBudget::Zcdp(total);
}

absl::StatusOr<int> Depth(int64_t m) {
  if (m < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("Depth requires m >= 1, got ", m));
  }
  return static_cast<int>(std::bit_width(static_cast<uint64_t>(m)));
}

absl::StatusOr<double> PerLevelParam(const PrivacyBudget& budget, int64_t m) {
  absl::StatusOr<int> depth = Depth(m);
  if (!depth.ok()) return depth.status();
  return budget.SplitEpsilon(*depth);
}

int64_t TargetRank(double q, size_t n) {
  return static_cast<int64_t>(std::floor(q * static_cast<double>(n)));
}

size_t Gap(const SortedDataset& x, double d1, double d2) {
  const double lo = std::min(d1, d2);
  const double hi = std::max(d1, d2);
  return x.CountBelow(hi) - x.CountBelow(lo);
}

absl::StatusOr<Interval> TrueQuantile(const SortedDataset& x, double q) {
  if (x.empty()) {
    return absl::InvalidArgumentError("TrueQuantile requires a nonempty X");
  }
  if (!(q > 0.0 && q < 1.0)) {
    return absl::InvalidArgumentError("Quantile fraction must lie in (0, 1)");
  }
  const int64_t k = TargetRank(q, x.size());
  const double lo = k == 0 ? x.domain().lo() : x[k - 1];
  const double hi = static_cast<size_t>(k) == x.size() ? x.domain().hi() : x[k];
  return Interval::Create(lo, hi);
}

}  // namespace dpq
