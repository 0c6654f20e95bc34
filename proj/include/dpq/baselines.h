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
#ifndef DPQ_BASELINES_H_
#define DPQ_BASELINES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpq/core.h"
#include "dpq/random.h"

namespace dpq {

//===----------------------------------------------------------------------===//
// IndExp: one exponential-mechanism call per quantile on the full data.
//===----------------------------------------------------------------------===//

inline constexpr double kDefaultDelta = 1e-6;

enum class Composition {
  // eps' = eps / m.
  kBasic,
  // eps' = eps / (2 sqrt(2 m ln(1/delta))), an (eps, delta) guarantee.
  kAdvanced,
  // The larger eps' of the two; each is a valid (eps, delta) guarantee.
  kBestOf,
};

struct IndExpOptions {
  Composition composition = Composition::kBasic;
  double delta = kDefaultDelta;
};

// Per-call epsilon for m calls. zCDP budgets ignore `options` and use
// sqrt(2 rho / m).
absl::StatusOr<double> IndExpPerCallEpsilon(const PrivacyBudget& budget,
                                            size_t m,
                                            const IndExpOptions& options = {});

// Total epsilon of k adaptive eps'-DP mechanisms by the advanced composition
// theorem at the given delta: eps' sqrt(2 k ln(1/delta)) + k eps' (e^eps' - 1).
double AdvancedCompositionEpsilon(double per_call, size_t k, double delta);

absl::StatusOr<std::vector<double>> IndExp(const SortedDataset& x,
                                           const QuantileRequest& request,
                                           const PrivacyBudget& budget,
                                           RandomSource& rng,
                                           const IndExpOptions& options = {});

//===----------------------------------------------------------------------===//
// AggTree: Laplace-noised hierarchical histogram with interpolated readout.
//===----------------------------------------------------------------------===//

struct TreeConfig {
  int branching = 2;
  int height = 1;

  // b = 2, h = ceil(log2(max(n, 16))).
  static TreeConfig ForSize(size_t n);
  absl::Status Validate() const;
  size_t NumLeaves() const;
};

// counts[l][j] is node j of level l; level 0 is the root, level `height`
// holds the b^h leaves.
using TreeCounts = std::vector<std::vector<double>>;

enum class PrefixMode {
  // Running sum of noisy leaf counts.
  kLeafScan,
  // Noisy prefix from the canonical decomposition over levels 1..h.
  kHierarchical,
};

struct AggTreeReadout {
  PrefixMode prefix = PrefixMode::kLeafScan;
  // Replace negative noisy counts with 0 before summing.
  bool truncate_negative = false;
};

// Leaf j counts the points in [c_j, c_{j+1}); internal nodes sum children.
absl::StatusOr<TreeCounts> ExactTreeCounts(const SortedDataset& x,
                                           const TreeConfig& config);

// Laplace scale per node: h / eps for pure DP, sqrt(h / (2 rho)) for zCDP.
double AggTreeNoiseScale(const PrivacyBudget& budget, int height);

class NoisyTree {
 public:
  NoisyTree(TreeCounts counts, TreeConfig config, Interval domain,
            double noise_scale)
      : counts_(std::move(counts)),
        config_(config),
        domain_(domain),
        noise_scale_(noise_scale) {}

  const TreeCounts& counts() const { return counts_; }
  const TreeConfig& config() const { return config_; }
  const Interval& domain() const { return domain_; }
  double noise_scale() const { return noise_scale_; }

  // c_j = lo + j (hi - lo) / b^h.
  double LeafEdge(size_t j) const;

  // Leftmost leaf z whose noisy prefix reaches q * n_hint, then linear
  // interpolation (1 - p) c_z + p c_{z+1} with p = (q n - c^-(z)) / c(z)
  // clamped to [0, 1]. If no prefix reaches the target the result is the
  // right domain edge minus 1e-9 domain widths.
  absl::StatusOr<std::vector<double>> Quantiles(
      std::span<const double> fractions, double n_hint,
      const AggTreeReadout& readout = {}) const;
  absl::StatusOr<double> Quantile(double q, double n_hint,
                                  const AggTreeReadout& readout = {}) const;

 private:
  std::vector<double> NoisyPrefix(const AggTreeReadout& readout) const;

  TreeCounts counts_;
  TreeConfig config_;
  Interval domain_;
  double noise_scale_;
};

absl::StatusOr<NoisyTree> BuildAggTree(const SortedDataset& x,
                                       const PrivacyBudget& budget,
                                       const TreeConfig& config,
                                       RandomSource& rng);

// Builds a tree and reads every requested quantile with n_hint = |X|.
absl::StatusOr<std::vector<double>> AggTreeQuantiles(
    const SortedDataset& x, const QuantileRequest& request,
    const PrivacyBudget& budget, const TreeConfig& config, RandomSource& rng,
    const AggTreeReadout& readout = {});

//===----------------------------------------------------------------------===//
// JointExp reference: brute-force exponential mechanism over m-tuples.
//===----------------------------------------------------------------------===//

inline constexpr uint64_t kMaxJointExpTuples = 1'000'000;

enum class JointExpTarget {
  // Target gap of term j is (q_j - q_{j-1}) n; sensitivity 2 under
  // add/remove neighbors.
  kFractional,
  // Target gap is floor(q_j n) - floor(q_{j-1} n); sensitivity can reach 4.
  kFloorRank,
};

struct TupleProbability {
  std::vector<double> tuple;
  double probability;
};

// -sum_{j=1}^{m+1} | target_j - |X in [v_{j-1}, v_j)| | with v_0 = lo and
// v_{m+1} = hi. `tuple` must be nondecreasing.
double JointExpUtility(const SortedDataset& x, const QuantileRequest& request,
                       std::span<const double> tuple, JointExpTarget target);

// C(g + m - 1, m); errors if the count exceeds kMaxJointExpTuples.
absl::StatusOr<uint64_t> CountNondecreasingTuples(size_t g, size_t m);

// Exact distribution over nondecreasing m-tuples of `grid` points with
// probability proportional to exp(eps u / (2 * 2)).
absl::StatusOr<std::vector<TupleProbability>> JointExpDistribution(
    std::span<const double> grid, const SortedDataset& x,
    const QuantileRequest& request, double epsilon,
    JointExpTarget target = JointExpTarget::kFractional);

absl::StatusOr<std::vector<double>> JointExpOracle(
    std::span<const double> grid, const SortedDataset& x,
    const QuantileRequest& request, double epsilon, RandomSource& rng,
    JointExpTarget target = JointExpTarget::kFractional);

}  // namespace dpq

#endif  // DPQ_BASELINES_H_
