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
#ifndef DPQ_DATA_H_
#define DPQ_DATA_H_

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "dpq/core.h"
#include "dpq/random.h"

namespace dpq {

struct SyntheticUniform {
  double lo;
  double hi;
};

struct SyntheticGaussian {
  double mean;
  double stddev;
};

// A named numeric column of a CSV file with a header row.
struct CsvColumn {
  std::string path;
  std::string column;
};

using DataSource = std::variant<SyntheticUniform, SyntheticGaussian, CsvColumn>;

struct DatasetSpec {
  std::string name;
  DataSource source;
  // Experiment domain; every emitted point lies strictly inside it.
  Interval clamp;
};

// Largest distance from the domain edge at which clamped points are placed.
inline constexpr double kClampOffset = 1e-6;
// Upper bound on the dedup jitter radius.
inline constexpr double kMaxJitter = 1e-6;
// Minimum spacing inside a perturbed run, as a fraction of the jitter radius.
inline constexpr double kTieBreakSpacing = 1e-3;

// Draws n points (synthetic) or the first n rows after a seeded shuffle (CSV),
// clamps them into spec.clamp, breaks ties with DedupPerturb and sorts.
absl::StatusOr<SortedDataset> Generate(const DatasetSpec& spec, size_t n,
                                       RandomSource& rng);

// Reads `column` from CSV text. The first non-comment line is the header;
// lines starting with '#' and blank lines are skipped. Errors carry 1-based
// line numbers.
absl::StatusOr<std::vector<double>> ReadCsvColumn(std::istream& in,
                                                  const std::string& column);
absl::StatusOr<std::vector<double>> ReadCsvColumnFromFile(
    const std::string& path, const std::string& column);

// Points at or beyond an endpoint move inside, min(kClampOffset, width / 4)
// away from it.
std::vector<double> ClampToDomain(std::span<const double> points,
                                  const Interval& domain);

// Jitter radius eta = min(kMaxJitter, g / 4) where g is the smallest positive
// spacing among the sorted distinct values and the domain endpoints.
double PerturbationScale(std::span<const double> sorted_points,
                         const Interval& domain);

// Sorts and separates equal values: each run of copies of v is replaced by
// sorted uniform jitter in (v - eta, v + eta) with spacing at least
// eta * kTieBreakSpacing. Distinct inputs come back unchanged. Fails when a
// run has too many copies to fit at that spacing.
absl::StatusOr<SortedDataset> DedupPerturb(std::vector<double> points,
                                           const Interval& domain,
                                           RandomSource& rng);

// Uniform sample of k points without replacement, in sorted order.
absl::StatusOr<SortedDataset> Subsample(const SortedDataset& x, size_t k,
                                        RandomSource& rng);

}  // namespace dpq

#endif  // DPQ_DATA_H_
