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
#ifndef DPQ_BENCH_H_
#define DPQ_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dpq/baselines.h"
#include "dpq/core.h"
#include "dpq/data.h"

namespace dpq {

enum class Algorithm { kAq, kIndExp, kAggTree };

absl::string_view AlgorithmName(Algorithm algorithm);
absl::StatusOr<Algorithm> ParseAlgorithm(absl::string_view name);

struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  // Size of each synthetic base dataset; CSV datasets use all their rows.
  size_t dataset_size = 10000;
  size_t n_sub = 1000;
  std::vector<size_t> m_values;
  size_t trials = 100;
  PrivacyBudget budget = PrivacyBudget::PureDp(1.0).value();
  Interval range = Interval::Create(-100.0, 100.0).value();
  std::vector<Algorithm> algorithms = {Algorithm::kAq, Algorithm::kIndExp,
                                       Algorithm::kAggTree};
  uint64_t seed = 1;
  IndExpOptions indexp = {Composition::kBestOf, kDefaultDelta};
  // Unset means TreeConfig::ForSize(n_sub).
  std::optional<TreeConfig> tree;
  AggTreeReadout readout;
  // Time the sort of the subsample together with the algorithm call.
  bool include_sort = false;
  size_t workers = 1;

  // Output settings used by the CLI.
  std::string out_path;
  bool print_timing = false;

  // Uniform U(-5, 5) and Gaussian N(0, 5) datasets, m = 1..120, 100 trials.
  static ExperimentConfig Default();
  absl::Status Validate() const;
};

// Applies one `key = value` setting, as found in a config file or a CLI flag.
// Keys: datasets, dataset_size, n_sub, m, trials, seed, eps, rho, range,
// algorithms, indexp_composition, delta, tree_branching, tree_height,
// tree_readout, truncate_negative, include_sort, workers, out, timing.
absl::Status ApplySetting(ExperimentConfig& config, absl::string_view key,
                          absl::string_view value);

// Parses `key = value` lines ('#' starts a comment; an optional [section]
// header is ignored) on top of ExperimentConfig::Default().
absl::StatusOr<ExperimentConfig> ParseConfig(std::istream& in);
absl::StatusOr<ExperimentConfig> ParseConfigFile(const std::string& path);

// "uniform", "gaussian" or "name=path:column", comma separated.
absl::StatusOr<std::vector<DatasetSpec>> ParseDatasets(absl::string_view list,
                                                       const Interval& range);
// Comma-separated values and inclusive ranges, e.g. "1..10,16,32".
absl::StatusOr<std::vector<size_t>> ParseMValues(absl::string_view list);

struct ResultRow {
  std::string dataset;
  std::string algorithm;
  size_t m;
  size_t trial;
  double avg_gap;
  int64_t err_max;
  int64_t wall_ns;
  uint64_t seed;

  bool operator==(const ResultRow&) const = default;
};

struct SweepResult {
  // Completed rows ordered by (dataset, algorithm, m, trial).
  std::vector<ResultRow> rows;
  // First error encountered; rows of the failed runs are absent.
  absl::Status status;
};

// Every (dataset, algorithm, m, trial): a fresh subsample of n_sub points
// shared by all algorithms of that (dataset, m, trial), uniform fractions
// i / (m + 1), one timed algorithm call, and its error against the
// subsample's true quantiles.
SweepResult RunSweep(const ExperimentConfig& config);

// Runs one algorithm on a prepared dataset.
absl::StatusOr<std::vector<double>> RunAlgorithm(
    Algorithm algorithm, const SortedDataset& x,
    const QuantileRequest& request, const ExperimentConfig& config,
    RandomSource& rng);

struct TimingSummary {
  std::string algorithm;
  size_t m;
  size_t runs;
  double mean_ns;
  double median_ns;
};

// Mean and median wall time per (algorithm, m) across datasets and trials.
std::vector<TimingSummary> TimingReport(std::span<const ResultRow> rows);
void PrintTimingReport(std::span<const TimingSummary> summary,
                       std::ostream& out);

inline constexpr absl::string_view kResultsVersionLine = "# dpq-results v1";
inline constexpr absl::string_view kResultsHeader =
    "dataset,algorithm,m,trial,avg_gap,err_max,wall_ns,seed";

void WriteResultsCsv(std::span<const ResultRow> rows, std::ostream& out);
absl::StatusOr<std::vector<ResultRow>> ReadResultsCsv(std::istream& in);

// FNV-1a over the CSV serialization with wall_ns zeroed.
uint64_t DeterminismDigest(std::span<const ResultRow> rows);

struct LineFit {
  double slope;
  double intercept;
  double r_squared;
};

// Ordinary least squares y = intercept + slope * x.
absl::StatusOr<LineFit> FitLine(std::span<const double> x,
                                std::span<const double> y);

}  // namespace dpq

#endif  // DPQ_BENCH_H_
