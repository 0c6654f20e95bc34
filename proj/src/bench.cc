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
#include "dpq/bench.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "dpq/aq.h"

namespace dpq {
namespace {

absl::string_view Trim(absl::string_view s) {
  s = absl::StripAsciiWhitespace(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') &&
      s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

absl::Status BadValue(absl::string_view key, absl::string_view value) {
  return absl::InvalidArgumentError(
      absl::StrCat("Invalid value for '", key, "': '", value, "'"));
}

absl::StatusOr<size_t> ParseSize(absl::string_view key,
                                 absl::string_view value) {
  uint64_t v;
  if (!absl::SimpleAtoi(value, &v)) return BadValue(key, value);
  return static_cast<size_t>(v);
}

absl::StatusOr<double> ParseDouble(absl::string_view key,
                                   absl::string_view value) {
  double v;
  if (!absl::SimpleAtod(value, &v)) return BadValue(key, value);
  return v;
}

absl::StatusOr<bool> ParseBool(absl::string_view key, absl::string_view value) {
  bool v;
  if (!absl::SimpleAtob(value, &v)) return BadValue(key, value);
  return v;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

void AppendCsvRow(const ResultRow& row, bool with_timing, std::string& out) {
  absl::StrAppend(&out, row.dataset, ",", row.algorithm, ",", row.m, ",",
                  row.trial, ",", FormatDouble(row.avg_gap), ",", row.err_max,
                  ",", with_timing ? row.wall_ns : 0, ",", row.seed, "\n");
}

// Seed shared by every algorithm for one (dataset, m, trial).
uint64_t TrialSeed(uint64_t seed, size_t dataset, size_t m, size_t trial) {
  return MixSeed(MixSeed(MixSeed(seed, dataset + 1), m), trial);
}

absl::StatusOr<SortedDataset> LoadDataset(const DatasetSpec& spec,
                                          size_t synthetic_size,
                                          RandomSource& rng) {
  size_t n = synthetic_size;
  if (const auto* csv = std::get_if<CsvColumn>(&spec.source)) {
    absl::StatusOr<std::vector<double>> values =
        ReadCsvColumnFromFile(csv->path, csv->column);
    if (!values.ok()) return values.status();
    n = values->size();
  }
  return Generate(spec, n, rng);
}

}  // namespace

absl::string_view AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kAq:
      return "AQ";
    case Algorithm::kIndExp:
      return "IndExp";
    case Algorithm::kAggTree:
      return "AggTree";
  }
  return "?";
}

absl::StatusOr<Algorithm> ParseAlgorithm(absl::string_view name) {
  const std::string lower = absl::AsciiStrToLower(Trim(name));
  if (lower == "aq") return Algorithm::kAq;
  if (lower == "indexp" || lower == "appindexp") return Algorithm::kIndExp;
  if (lower == "aggtree") return Algorithm::kAggTree;
  return absl::InvalidArgumentError(absl::StrCat("Unknown algorithm '", name,
                                                 "'"));
}

ExperimentConfig ExperimentConfig::Default() {
  ExperimentConfig config;
  config.datasets = ParseDatasets("uniform,gaussian", config.range).value();
  config.m_values = ParseMValues("1..120").value();
  return config;
}

absl::Status ExperimentConfig::Validate() const {
  if (datasets.empty()) return absl::InvalidArgumentError("No datasets");
  if (m_values.empty()) return absl::InvalidArgumentError("No m values");
  for (size_t m : m_values) {
    if (m == 0) return absl::InvalidArgumentError("m values must be >= 1");
  }
  if (trials == 0) return absl::InvalidArgumentError("trials must be >= 1");
  if (n_sub == 0) return absl::InvalidArgumentError("n_sub must be >= 1");
  if (algorithms.empty()) return absl::InvalidArgumentError("No algorithms");
  if (workers == 0) return absl::InvalidArgumentError("workers must be >= 1");
  if (tree.has_value()) {
    if (absl::Status s = tree->Validate(); !s.ok()) return s;
  }
  for (const DatasetSpec& spec : datasets) {
    if (!std::holds_alternative<CsvColumn>(spec.source) &&
        n_sub > dataset_size) {
      return absl::InvalidArgumentError(
          absl::StrCat("n_sub = ", n_sub, " exceeds dataset_size = ",
                       dataset_size));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<DatasetSpec>> ParseDatasets(absl::string_view list,
                                                       const Interval& range) {
  std::vector<DatasetSpec> specs;
  for (absl::string_view token : absl::StrSplit(list, ',', absl::SkipEmpty())) {
    token = Trim(token);
    if (token == "uniform") {
      specs.push_back({"uniform", SyntheticUniform{-5.0, 5.0}, range});
    } else if (token == "gaussian") {
      specs.push_back({"gaussian", SyntheticGaussian{0.0, 5.0}, range});
    } else {
      const size_t eq = token.find('=');
      const size_t colon = token.rfind(':');
      if (eq == absl::string_view::npos || colon == absl::string_view::npos ||
          colon < eq) {
        return absl::InvalidArgumentError(absl::StrCat(
            "Dataset '", token,
            "' is not uniform, gaussian or name=path:column"));
      }
      specs.push_back({std::string(token.substr(0, eq)),
                       CsvColumn{std::string(token.substr(eq + 1, colon - eq - 1)),
                                 std::string(token.substr(colon + 1))},
                       range});
    }
  }
  if (specs.empty()) return absl::InvalidArgumentError("Empty dataset list");
  return specs;
}

absl::StatusOr<std::vector<size_t>> ParseMValues(absl::string_view list) {
  std::vector<size_t> values;
  for (absl::string_view token : absl::StrSplit(list, ',', absl::SkipEmpty())) {
    token = Trim(token);
    const size_t dots = token.find("..");
    if (dots == absl::string_view::npos) {
      absl::StatusOr<size_t> v = ParseSize("m", token);
      if (!v.ok()) return v.status();
      values.push_back(*v);
      continue;
    }
    absl::StatusOr<size_t> first = ParseSize("m", token.substr(0, dots));
    absl::StatusOr<size_t> last = ParseSize("m", token.substr(dots + 2));
    if (!first.ok()) return first.status();
    if (!last.ok()) return last.status();
    if (*first > *last) return BadValue("m", token);
    for (size_t m = *first; m <= *last; ++m) values.push_back(m);
  }
  if (values.empty()) return absl::InvalidArgumentError("Empty m list");
  return values;
}

absl::Status ApplySetting(ExperimentConfig& config, absl::string_view key_in,
                          absl::string_view value_in) {
  const absl::string_view key = Trim(key_in);
  const absl::string_view value = Trim(value_in);
  auto assign_size = [&](size_t& field) -> absl::Status {
    absl::StatusOr<size_t> v = ParseSize(key, value);
    if (!v.ok()) return v.status();
    field = *v;
    return absl::OkStatus();
  };
  auto assign_bool = [&](bool& field) -> absl::Status {
    absl::StatusOr<bool> v = ParseBool(key, value);
    if (!v.ok()) return v.status();
    field = *v;
    return absl::OkStatus();
  };

  if (key == "datasets") {
    absl::StatusOr<std::vector<DatasetSpec>> specs =
        ParseDatasets(value, config.range);
    if (!specs.ok()) return specs.status();
    config.datasets = *std::move(specs);
  } else if (key == "dataset_size") {
    return assign_size(config.dataset_size);
  } else if (key == "n_sub") {
    return assign_size(config.n_sub);
  } else if (key == "m") {
    absl::StatusOr<std::vector<size_t>> m = ParseMValues(value);
    if (!m.ok()) return m.status();
    config.m_values = *std::move(m);
  } else if (key == "trials") {
    return assign_size(config.trials);
  } else if (key == "seed") {
    uint64_t seed;
    if (!absl::SimpleAtoi(value, &seed)) return BadValue(key, value);
    config.seed = seed;
  } else if (key == "eps" || key == "epsilon") {
    absl::StatusOr<double> eps = ParseDouble(key, value);
    if (!eps.ok()) return eps.status();
    absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::PureDp(*eps);
    if (!budget.ok()) return budget.status();
    config.budget = *budget;
  } else if (key == "rho") {
    absl::StatusOr<double> rho = ParseDouble(key, value);
    if (!rho.ok()) return rho.status();
    absl::StatusOr<PrivacyBudget> budget = PrivacyBudget::Zcdp(*rho);
    if (!budget.ok()) return budget.status();
    config.budget = *budget;
  } else if (key == "range") {
    std::vector<absl::string_view> parts = absl::StrSplit(value, ',');
    if (parts.size() != 2) return BadValue(key, value);
    absl::StatusOr<double> lo = ParseDouble(key, Trim(parts[0]));
    absl::StatusOr<double> hi = ParseDouble(key, Trim(parts[1]));
    if (!lo.ok()) return lo.status();
    if (!hi.ok()) return hi.status();
    absl::StatusOr<Interval> range = Interval::Create(*lo, *hi);
    if (!range.ok()) return range.status();
    config.range = *range;
    for (DatasetSpec& spec : config.datasets) spec.clamp = *range;
  } else if (key == "algorithms") {
    std::vector<Algorithm> algorithms;
    for (absl::string_view name :
         absl::StrSplit(value, ',', absl::SkipEmpty())) {
      absl::StatusOr<Algorithm> a = ParseAlgorithm(name);
      if (!a.ok()) return a.status();
      algorithms.push_back(*a);
    }
    if (algorithms.empty()) return BadValue(key, value);
    config.algorithms = std::move(algorithms);
  } else if (key == "indexp_composition") {
    if (value == "basic") {
      config.indexp.composition = Composition::kBasic;
    } else if (value == "advanced") {
      config.indexp.composition = Composition::kAdvanced;
    } else if (value == "best") {
      config.indexp.composition = Composition::kBestOf;
    } else {
      return BadValue(key, value);
    }
  } else if (key == "delta") {
    absl::StatusOr<double> delta = ParseDouble(key, value);
    if (!delta.ok()) return delta.status();
    config.indexp.delta = *delta;
  } else if (key == "tree_branching" || key == "tree_height") {
    absl::StatusOr<size_t> v = ParseSize(key, value);
    if (!v.ok()) return v.status();
    TreeConfig tree = config.tree.value_or(TreeConfig::ForSize(config.n_sub));
    (key == "tree_branching" ? tree.branching : tree.height) =
        static_cast<int>(*v);
    config.tree = tree;
  } else if (key == "tree_readout") {
    if (value == "leaf") {
      config.readout.prefix = PrefixMode::kLeafScan;
    } else if (value == "hierarchical") {
      config.readout.prefix = PrefixMode::kHierarchical;
    } else {
      return BadValue(key, value);
    }
  } else if (key == "truncate_negative") {
    return assign_bool(config.readout.truncate_negative);
  } else if (key == "include_sort") {
    return assign_bool(config.include_sort);
  } else if (key == "workers") {
    return assign_size(config.workers);
  } else if (key == "out") {
    config.out_path = std::string(value);
  } else if (key == "timing") {
    return assign_bool(config.print_timing);
  } else {
    return absl::InvalidArgumentError(absl::StrCat("Unknown key '", key, "'"));
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ParseConfig(std::istream& in) {
  ExperimentConfig config = ExperimentConfig::Default();
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    absl::string_view text = line;
    if (const size_t hash = text.find('#'); hash != absl::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = absl::StripAsciiWhitespace(text);
    if (text.empty() || text.front() == '[') continue;
    const size_t eq = text.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": expected key = value"));
    }
    absl::Status s =
        ApplySetting(config, text.substr(0, eq), text.substr(eq + 1));
    if (!s.ok()) {
      return absl::Status(s.code(),
                          absl::StrCat("line ", line_number, ": ", s.message()));
    }
  }
  return config;
}

absl::StatusOr<ExperimentConfig> ParseConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ParseConfig(in);
}

absl::StatusOr<std::vector<double>> RunAlgorithm(
    Algorithm algorithm, const SortedDataset& x,
    const QuantileRequest& request, const ExperimentConfig& config,
    RandomSource& rng) {
  switch (algorithm) {
    case Algorithm::kAq: {
      absl::StatusOr<AqResult> result =
          ApproximateQuantiles(x, request, config.budget, rng);
      if (!result.ok()) return result.status();
      return std::move(result->estimates);
    }
    case Algorithm::kIndExp:
      return IndExp(x, request, config.budget, rng, config.indexp);
    case Algorithm::kAggTree:
      return AggTreeQuantiles(
          x, request, config.budget,
          config.tree.value_or(TreeConfig::ForSize(config.n_sub)), rng,
          config.readout);
  }
  return absl::InternalError("Unknown algorithm");
}

SweepResult RunSweep(const ExperimentConfig& config) {
  SweepResult result;
  if (absl::Status s = config.Validate(); !s.ok()) {
    result.status = s;
    return result;
  }
  absl::Status first_error;
  std::mutex error_mutex;
  auto record_error = [&](const absl::Status& s) {
    std::lock_guard<std::mutex> lock(error_mutex);
    if (first_error.ok()) first_error = s;
  };

  std::vector<std::optional<SortedDataset>> bases(config.datasets.size());
  for (size_t d = 0; d < config.datasets.size(); ++d) {
    RandomSource rng(MixSeed(config.seed, d));
    absl::StatusOr<SortedDataset> base =
        LoadDataset(config.datasets[d], config.dataset_size, rng);
    if (!base.ok()) {
      record_error(absl::Status(
          base.status().code(), absl::StrCat("dataset '", config.datasets[d].name,
                                             "': ", base.status().message())));
      continue;
    }
    if (base->size() < config.n_sub) {
      record_error(absl::FailedPreconditionError(
          absl::StrCat("dataset '", config.datasets[d].name, "' has ",
                       base->size(), " points, n_sub = ", config.n_sub)));
      continue;
    }
    bases[d] = *std::move(base);
  }

  const size_t num_a = config.algorithms.size();
  const size_t num_m = config.m_values.size();
  const size_t num_t = config.trials;
  const size_t num_tasks = config.datasets.size() * num_m * num_t;
  std::vector<std::optional<ResultRow>> slots(num_tasks * num_a);

  auto run_task = [&](size_t task) {
    const size_t d = task / (num_m * num_t);
    const size_t mi = (task / num_t) % num_m;
    const size_t trial = task % num_t;
    if (!bases[d].has_value()) return;
    const size_t m = config.m_values[mi];
    const uint64_t trial_seed = TrialSeed(config.seed, d, m, trial);
    RandomSource data_rng(trial_seed);
    absl::StatusOr<SortedDataset> sub =
        Subsample(*bases[d], config.n_sub, data_rng);
    if (!sub.ok()) {
      record_error(sub.status());
      return;
    }
    const QuantileRequest request = QuantileRequest::Uniform(m);
    std::vector<double> shuffled;
    if (config.include_sort) {
      shuffled.assign(sub->points().begin(), sub->points().end());
      std::shuffle(shuffled.begin(), shuffled.end(), data_rng);
    }
    for (size_t a = 0; a < num_a; ++a) {
      RandomSource rng(MixSeed(trial_seed, a + 1));
      absl::StatusOr<std::vector<double>> estimates;
      const auto start = std::chrono::steady_clock::now();
      if (config.include_sort) {
        std::vector<double> points = shuffled;
        std::sort(points.begin(), points.end());
        absl::StatusOr<SortedDataset> sorted =
            SortedDataset::Create(std::move(points), sub->domain());
        estimates = sorted.ok() ? RunAlgorithm(config.algorithms[a], *sorted,
                                               request, config, rng)
                                : sorted.status();
      } else {
        estimates =
            RunAlgorithm(config.algorithms[a], *sub, request, config, rng);
      }
      const auto stop = std::chrono::steady_clock::now();
      if (!estimates.ok()) {
        record_error(estimates.status());
        continue;
      }
      const int64_t wall_ns =
          std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start)
              .count();
      ResultRow row;
      row.dataset = config.datasets[d].name;
      row.algorithm = std::string(AlgorithmName(config.algorithms[a]));
      row.m = m;
      row.trial = trial;
      row.avg_gap = AverageGap(*sub, request, *estimates).value();
      row.err_max = ErrMax(*sub, request, *estimates).value();
      row.wall_ns = std::max<int64_t>(1, wall_ns);
      row.seed = trial_seed;
      slots[((d * num_a + a) * num_m + mi) * num_t + trial] = std::move(row);
    }
  };

  const size_t workers =
      config.print_timing ? 1 : std::min(config.workers, num_tasks);
  if (workers <= 1) {
    for (size_t task = 0; task < num_tasks; ++task) run_task(task);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t task = next++; task < num_tasks; task = next++) {
          run_task(task);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  for (std::optional<ResultRow>& slot : slots) {
    if (slot.has_value()) result.rows.push_back(*std::move(slot));
  }
  result.status = first_error;
  return result;
}

std::vector<TimingSummary> TimingReport(std::span<const ResultRow> rows) {
  std::map<std::pair<std::string, size_t>, std::vector<int64_t>> groups;
  for (const ResultRow& row : rows) {
    groups[{row.algorithm, row.m}].push_back(row.wall_ns);
  }
  std::vector<TimingSummary> summary;
  for (auto& [key, times] : groups) {
    std::sort(times.begin(), times.end());
    double total = 0.0;
    for (int64_t t : times) total += static_cast<double>(t);
    const size_t k = times.size();
    const double median =
        k % 2 == 1 ? static_cast<double>(times[k / 2])
                   : 0.5 * static_cast<double>(times[k / 2 - 1] + times[k / 2]);
    summary.push_back(TimingSummary{key.first, key.second, k,
                                    total / static_cast<double>(k), median});
  }
  return summary;
}

void PrintTimingReport(std::span<const TimingSummary> summary,
                       std::ostream& out) {
  out << std::left << std::setw(10) << "algorithm" << std::right
      << std::setw(6) << "m" << std::setw(8) << "runs" << std::setw(16)
      << "mean_us" << std::setw(16) << "median_us" << "\n";
  out << std::fixed << std::setprecision(2);
  for (const TimingSummary& s : summary) {
    out << std::left << std::setw(10) << s.algorithm << std::right
        << std::setw(6) << s.m << std::setw(8) << s.runs << std::setw(16)
        << s.mean_ns / 1e3 << std::setw(16) << s.median_ns / 1e3 << "\n";
  }
}

void WriteResultsCsv(std::span<const ResultRow> rows, std::ostream& out) {
  std::string text = absl::StrCat(kResultsVersionLine, "\n", kResultsHeader,
                                  "\n");
  for (const ResultRow& row : rows) AppendCsvRow(row, true, text);
  out << text;
}

absl::StatusOr<std::vector<ResultRow>> ReadResultsCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsVersionLine) {
    return absl::InvalidArgumentError(
        absl::StrCat("line 1: expected '", kResultsVersionLine, "'"));
  }
  if (!std::getline(in, line) || line != kResultsHeader) {
    return absl::InvalidArgumentError(
        absl::StrCat("line 2: expected '", kResultsHeader, "'"));
  }
  std::vector<ResultRow> rows;
  size_t line_number = 2;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::vector<absl::string_view> f = absl::StrSplit(line, ',');
    ResultRow row;
    uint64_t m, trial;
    if (f.size() != 8 || !absl::SimpleAtoi(f[2], &m) ||
        !absl::SimpleAtoi(f[3], &trial) || !absl::SimpleAtod(f[4], &row.avg_gap) ||
        !absl::SimpleAtoi(f[5], &row.err_max) ||
        !absl::SimpleAtoi(f[6], &row.wall_ns) ||
        !absl::SimpleAtoi(f[7], &row.seed)) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": malformed result row"));
    }
    row.dataset = std::string(f[0]);
    row.algorithm = std::string(f[1]);
    row.m = m;
    row.trial = trial;
    rows.push_back(std::move(row));
  }
  return rows;
}

uint64_t DeterminismDigest(std::span<const ResultRow> rows) {
  std::string text;
  for (const ResultRow& row : rows) AppendCsvRow(row, false, text);
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

absl::StatusOr<LineFit> FitLine(std::span<const double> x,
                                std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    return absl::InvalidArgumentError("Need at least two paired samples");
  }
  const double n = static_cast<double>(x.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mean_x) * (x[i] - mean_x);
    sxy += (x[i] - mean_x) * (y[i] - mean_y);
    syy += (y[i] - mean_y) * (y[i] - mean_y);
  }
  if (sxx == 0.0) return absl::InvalidArgumentError("x has zero variance");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace dpq
