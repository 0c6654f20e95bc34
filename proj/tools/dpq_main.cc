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
// Command-line entry point: `dpq bench` runs experiment sweeps and
// `dpq quantiles` estimates quantiles of one CSV column.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpq/aq.h"
#include "dpq/bench.h"
#include "dpq/core.h"
#include "dpq/data.h"
#include "dpq/random.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPartial = 2;

struct BenchFlags {
  std::string config;
  std::vector<std::pair<std::string, std::string>> overrides;
};

int Fail(const absl::Status& status) {
  std::cerr << "dpq: " << status << "\n";
  return kExitError;
}

int RunBench(const BenchFlags& flags) {
  absl::StatusOr<dpq::ExperimentConfig> config =
      flags.config.empty() ? dpq::ExperimentConfig::Default()
                           : dpq::ParseConfigFile(flags.config);
  if (!config.ok()) return Fail(config.status());
  for (const auto& [key, value] : flags.overrides) {
    if (absl::Status s = dpq::ApplySetting(*config, key, value); !s.ok()) {
      return Fail(s);
    }
  }
  if (absl::Status s = config->Validate(); !s.ok()) return Fail(s);

  const dpq::SweepResult sweep = dpq::RunSweep(*config);

  if (config->out_path.empty() || config->out_path == "-") {
    dpq::WriteResultsCsv(sweep.rows, std::cout);
  } else {
    std::ofstream out(config->out_path);
    if (!out) {
      return Fail(absl::UnavailableError("cannot write " + config->out_path));
    }
    dpq::WriteResultsCsv(sweep.rows, out);
  }
  if (config->print_timing && !sweep.rows.empty()) {
    dpq::PrintTimingReport(dpq::TimingReport(sweep.rows), std::cerr);
  }
  if (!sweep.status.ok()) {
    std::cerr << "dpq: sweep incomplete (" << sweep.rows.size()
              << " rows written): " << sweep.status << "\n";
    return kExitPartial;
  }
  return kExitOk;
}

struct QuantileFlags {
  std::string csv;
  std::string column;
  size_t m = 1;
  std::optional<double> eps;
  std::optional<double> rho;
  double lo = -100.0;
  double hi = 100.0;
  uint64_t seed = 1;
};

int RunQuantiles(const QuantileFlags& flags) {
  absl::StatusOr<dpq::Interval> domain =
      dpq::Interval::Create(flags.lo, flags.hi);
  if (!domain.ok()) return Fail(domain.status());
  absl::StatusOr<dpq::PrivacyBudget> budget =
      flags.rho.has_value() ? dpq::PrivacyBudget::Zcdp(*flags.rho)
                            : dpq::PrivacyBudget::PureDp(flags.eps.value_or(1.0));
  if (!budget.ok()) return Fail(budget.status());
  absl::StatusOr<std::vector<double>> values =
      dpq::ReadCsvColumnFromFile(flags.csv, flags.column);
  if (!values.ok()) return Fail(values.status());

  dpq::RandomSource rng(flags.seed);
  std::vector<double> clamped = dpq::ClampToDomain(*values, *domain);
  absl::StatusOr<dpq::SortedDataset> x =
      dpq::DedupPerturb(std::move(clamped), *domain, rng);
  if (!x.ok()) return Fail(x.status());
  const dpq::QuantileRequest request = dpq::QuantileRequest::Uniform(flags.m);
  absl::StatusOr<dpq::AqResult> result =
      dpq::ApproximateQuantiles(*x, request, *budget, rng);
  if (!result.ok()) return Fail(result.status());

  std::cout.precision(17);
  std::cout << "q,estimate\n";
  for (size_t i = 0; i < request.size(); ++i) {
    std::cout << request[i] << "," << result->estimates[i] << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private quantile estimation"};
  app.require_subcommand(1);

  BenchFlags bench;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "Run an error/runtime sweep, emit CSV");
  bench_cmd->add_option("--config", bench.config, "key = value config file")
      ->check(CLI::ExistingFile);
  for (const char* key : {"eps", "rho", "m", "trials", "seed", "out",
                          "datasets", "algorithms", "n_sub", "dataset_size",
                          "range", "workers", "tree_branching", "tree_height",
                          "tree_readout", "indexp_composition", "delta"}) {
    const std::string name = key;
    bench_cmd->add_option_function<std::string>(
        "--" + name,
        [&bench, name](const std::string& value) {
          bench.overrides.emplace_back(name, value);
        },
        "Overrides '" + name + "' from the config");
  }
  for (const char* key : {"timing", "include_sort", "truncate_negative"}) {
    const std::string name = key;
    bench_cmd->add_flag_callback(
        "--" + name,
        [&bench, name] { bench.overrides.emplace_back(name, "true"); },
        "Sets '" + name + "'");
  }

  QuantileFlags quantiles;
  CLI::App* quantiles_cmd = app.add_subcommand(
      "quantiles", "Estimate m uniform quantiles of one CSV column");
  quantiles_cmd->add_option("--csv", quantiles.csv)->required()->check(
      CLI::ExistingFile);
  quantiles_cmd->add_option("--column", quantiles.column)->required();
  quantiles_cmd->add_option("--m", quantiles.m)->check(CLI::PositiveNumber);
  auto* eps = quantiles_cmd->add_option("--eps", quantiles.eps);
  quantiles_cmd->add_option("--rho", quantiles.rho)->excludes(eps);
  quantiles_cmd->add_option("--lo", quantiles.lo);
  quantiles_cmd->add_option("--hi", quantiles.hi);
  quantiles_cmd->add_option("--seed", quantiles.seed);

  CLI11_PARSE(app, argc, argv);

  if (bench_cmd->parsed()) return RunBench(bench);
  return RunQuantiles(quantiles);
}
