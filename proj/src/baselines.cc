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
#include "dpq/baselines.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "dpq/expmech.h"

namespace dpq {
namespace {

constexpr double kEdgeOffset = 1e-9;
constexpr size_t kMaxLeaves = size_t{1} << 24;

}  // namespace

absl::StatusOr<double> IndExpPerCallEpsilon(const PrivacyBudget& budget,
                                            size_t m,
                                            const IndExpOptions& options) {
  if (m == 0) return absl::InvalidArgumentError("m must be positive");
  const auto k = static_cast<int64_t>(m);
  if (budget.kind() == PrivacyKind::kZcdp) return budget.SplitEpsilon(k);
  if (options.composition != Composition::kBasic &&
      !(options.delta > 0.0 && options.delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Advanced composition needs delta in (0, 1), got ",
                     options.delta));
  }
  const double basic = budget.SplitEpsilon(k);
  const double advanced =
      budget.value() /
      (2.0 * std::sqrt(2.0 * static_cast<double>(m) *
                       std::log(1.0 / options.delta)));
  switch (options.composition) {
    case Composition::kBasic:
      return basic;
    case Composition::kAdvanced:
      return advanced;
    case Composition::kBestOf:
      return std::max(basic, advanced);
  }
  return basic;
}

double AdvancedCompositionEpsilon(double per_call, size_t k, double delta) {
  const double dk = static_cast<double>(k);
  return per_call * std::sqrt(2.0 * dk * std::log(1.0 / delta)) +
         dk * per_call * std::expm1(per_call);
}

absl::StatusOr<std::vector<double>> IndExp(const SortedDataset& x,
                                           const QuantileRequest& request,
                                           const PrivacyBudget& budget,
                                           RandomSource& rng,
                                           const IndExpOptions& options) {
  absl::StatusOr<double> eps =
      IndExpPerCallEpsilon(budget, request.size(), options);
  if (!eps.ok()) return eps.status();
  std::vector<double> estimates(request.size());
  for (size_t j = 0; j < request.size(); ++j) {
    estimates[j] = internal::SampleQuantileUnchecked(
        x.domain().lo(), x.domain().hi(), x.points(), request[j], *eps,
        SamplingMode::kExponential, rng);
  }
  return estimates;
}

TreeConfig TreeConfig::ForSize(size_t n) {
  const double size = static_cast<double>(std::max<size_t>(n, 16));
  return TreeConfig{2, static_cast<int>(std::ceil(std::log2(size)))};
}

absl::Status TreeConfig::Validate() const {
  if (branching < 2) {
    return absl::InvalidArgumentError("Branching factor must be at least 2");
  }
  if (height < 1) {
    return absl::InvalidArgumentError("Tree height must be at least 1");
  }
  size_t leaves = 1;
  for (int l = 0; l < height; ++l) {
    leaves *= static_cast<size_t>(branching);
    if (leaves > kMaxLeaves) {
      return absl::InvalidArgumentError(
          absl::StrCat("Tree has more than ", kMaxLeaves, " leaves"));
    }
  }
  return absl::OkStatus();
}

size_t TreeConfig::NumLeaves() const {
  size_t leaves = 1;
  for (int l = 0; l < height; ++l) leaves *= static_cast<size_t>(branching);
  return leaves;
}

absl::StatusOr<TreeCounts> ExactTreeCounts(const SortedDataset& x,
                                           const TreeConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const size_t b = static_cast<size_t>(config.branching);
  TreeCounts counts(config.height + 1);
  const size_t leaves = config.NumLeaves();
  counts[config.height].assign(leaves, 0.0);
  const double lo = x.domain().lo();
  const double scale = static_cast<double>(leaves) / x.domain().width();
  for (double point : x.points()) {
    const auto j = std::min(
        leaves - 1, static_cast<size_t>(std::floor((point - lo) * scale)));
    counts[config.height][j] += 1.0;
  }
  for (int l = config.height - 1; l >= 0; --l) {
    const std::vector<double>& children = counts[l + 1];
    counts[l].assign(children.size() / b, 0.0);
    for (size_t j = 0; j < children.size(); ++j) {
      counts[l][j / b] += children[j];
    }
  }
  return counts;
}

double AggTreeNoiseScale(const PrivacyBudget& budget, int height) {
  const double h = static_cast<double>(height);
  if (budget.kind() == PrivacyKind::kPureDp) return h / budget.value();
  return 1.0 / std::sqrt(2.0 * budget.value() / h);
}

double NoisyTree::LeafEdge(size_t j) const {
  return domain_.lo() + static_cast<double>(j) * domain_.width() /
                            static_cast<double>(config_.NumLeaves());
}

std::vector<double> NoisyTree::NoisyPrefix(
    const AggTreeReadout& readout) const {
  auto count = [&](int level, size_t j) {
    const double c = counts_[level][j];
    return readout.truncate_negative ? std::max(0.0, c) : c;
  };
  const int h = config_.height;
  const size_t leaves = counts_[h].size();
  std::vector<double> prefix(leaves);
  if (readout.prefix == PrefixMode::kLeafScan) {
    double running = 0.0;
    for (size_t z = 0; z < leaves; ++z) {
      running += count(h, z);
      prefix[z] = running;
    }
    return prefix;
  }
  // Leaves [0, k) decompose into whole nodes: at level l (node width w_l
  // leaves) the nodes [b * floor(k / w_{l-1}), floor(k / w_l)). The root is
  // never used, so level 1 starts at node 0.
  const size_t b = static_cast<size_t>(config_.branching);
  std::vector<size_t> width(h + 1);
  width[h] = 1;
  for (int l = h - 1; l >= 0; --l) width[l] = width[l + 1] * b;
  for (size_t z = 0; z < leaves; ++z) {
    const size_t k = z + 1;
    double total = 0.0;
    for (int l = 1; l <= h; ++l) {
      const size_t first = l == 1 ? 0 : b * (k / width[l - 1]);
      const size_t last = k / width[l];
      for (size_t j = first; j < last; ++j) total += count(l, j);
    }
    prefix[z] = total;
  }
  return prefix;
}

absl::StatusOr<std::vector<double>> NoisyTree::Quantiles(
    std::span<const double> fractions, double n_hint,
    const AggTreeReadout& readout) const {
  if (!(n_hint > 0.0)) {
    return absl::InvalidArgumentError("n_hint must be positive");
  }
  for (double q : fractions) {
    if (!(q > 0.0 && q < 1.0)) {
      return absl::InvalidArgumentError("Quantile fraction must lie in (0, 1)");
    }
  }
  const std::vector<double> prefix = NoisyPrefix(readout);
  // Noisy prefixes need not be monotone; the leftmost leaf whose prefix
  // reaches a target is the leftmost whose running maximum does.
  std::vector<double> running_max(prefix.size());
  double best = -std::numeric_limits<double>::infinity();
  for (size_t z = 0; z < prefix.size(); ++z) {
    best = std::max(best, prefix[z]);
    running_max[z] = best;
  }

  const double lo = domain_.lo() + kEdgeOffset * domain_.width();
  const double hi = domain_.hi() - kEdgeOffset * domain_.width();
  std::vector<double> estimates;
  estimates.reserve(fractions.size());
  for (double q : fractions) {
    const double target = q * n_hint;
    const auto it =
        std::lower_bound(running_max.begin(), running_max.end(), target);
    if (it == running_max.end()) {
      estimates.push_back(hi);
      continue;
    }
    const auto z = static_cast<size_t>(it - running_max.begin());
    const double below = z == 0 ? 0.0 : prefix[z - 1];
    const double in_leaf = prefix[z] - below;
    const double p =
        in_leaf > 0.0 ? std::clamp((target - below) / in_leaf, 0.0, 1.0) : 1.0;
    const double v = (1.0 - p) * LeafEdge(z) + p * LeafEdge(z + 1);
    estimates.push_back(std::clamp(v, lo, hi));
  }
  return estimates;
}

absl::StatusOr<double> NoisyTree::Quantile(double q, double n_hint,
                                           const AggTreeReadout& readout) const {
  absl::StatusOr<std::vector<double>> v =
      Quantiles(std::span<const double>(&q, 1), n_hint, readout);
  if (!v.ok()) return v.status();
  return v->front();
}

absl::StatusOr<NoisyTree> BuildAggTree(const SortedDataset& x,
                                       const PrivacyBudget& budget,
                                       const TreeConfig& config,
                                       RandomSource& rng) {
  absl::StatusOr<TreeCounts> counts = ExactTreeCounts(x, config);
  if (!counts.ok()) return counts.status();
  const double scale = std::isinf(budget.value())
                           ? 0.0
                           : AggTreeNoiseScale(budget, config.height);
  for (std::vector<double>& level : *counts) {
    for (double& c : level) c += SampleLaplace(scale, rng);
  }
  return NoisyTree(*std::move(counts), config, x.domain(), scale);
}

absl::StatusOr<std::vector<double>> AggTreeQuantiles(
    const SortedDataset& x, const QuantileRequest& request,
    const PrivacyBudget& budget, const TreeConfig& config, RandomSource& rng,
    const AggTreeReadout& readout) {
  absl::StatusOr<NoisyTree> tree = BuildAggTree(x, budget, config, rng);
  if (!tree.ok()) return tree.status();
  const double n = static_cast<double>(std::max<size_t>(x.size(), 1));
  return tree->Quantiles(request.fractions(), n, readout);
}

double JointExpUtility(const SortedDataset& x, const QuantileRequest& request,
                       std::span<const double> tuple, JointExpTarget target) {
  const size_t m = request.size();
  const size_t n = x.size();
  const double dn = static_cast<double>(n);
  double utility = 0.0;
  double prev_target = 0.0;
  size_t prev_below = 0;
  for (size_t j = 0; j <= m; ++j) {
    double cumulative_target;
    size_t below;
    if (j < m) {
      cumulative_target = target == JointExpTarget::kFractional
                              ? request[j] * dn
                              : static_cast<double>(TargetRank(request[j], n));
      below = x.CountBelow(tuple[j]);
    } else {
      cumulative_target = dn;
      below = n;
    }
    const double want = cumulative_target - prev_target;
    const double got = static_cast<double>(below - prev_below);
    utility -= std::abs(want - got);
    prev_target = cumulative_target;
    prev_below = below;
  }
  return utility;
}

absl::StatusOr<uint64_t> CountNondecreasingTuples(size_t g, size_t m) {
  if (g == 0 || m == 0) {
    return absl::InvalidArgumentError("Grid and tuple size must be positive");
  }
  // C(g + m - 1, m) accumulated as an exact running binomial.
  uint64_t count = 1;
  for (size_t i = 1; i <= m; ++i) {
    const uint64_t numerator = g - 1 + i;
    if (count > std::numeric_limits<uint64_t>::max() / numerator) {
      return absl::ResourceExhaustedError("Tuple count overflows");
    }
    count = count * numerator / i;
    if (count > kMaxJointExpTuples) {
      return absl::ResourceExhaustedError(
          absl::StrCat("More than ", kMaxJointExpTuples,
                       " tuples to enumerate"));
    }
  }
  return count;
}

absl::StatusOr<std::vector<TupleProbability>> JointExpDistribution(
    std::span<const double> grid, const SortedDataset& x,
    const QuantileRequest& request, double epsilon, JointExpTarget target) {
  if (std::isnan(epsilon) || epsilon < 0.0 || std::isinf(epsilon)) {
    return absl::InvalidArgumentError("Epsilon must be finite and >= 0");
  }
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!x.domain().Contains(grid[i]) || (i > 0 && !(grid[i - 1] < grid[i]))) {
      return absl::InvalidArgumentError(
          "Grid must be strictly increasing inside the domain");
    }
  }
  const size_t m = request.size();
  absl::StatusOr<uint64_t> count = CountNondecreasingTuples(grid.size(), m);
  if (!count.ok()) return count.status();

  std::vector<TupleProbability> out;
  out.reserve(*count);
  std::vector<double> log_weights;
  log_weights.reserve(*count);
  std::vector<size_t> idx(m, 0);
  std::vector<double> tuple(m);
  while (true) {
    for (size_t j = 0; j < m; ++j) tuple[j] = grid[idx[j]];
    // Sensitivity 2 enters the exponent as eps * u / (2 * 2).
    log_weights.push_back(0.25 * epsilon *
                          JointExpUtility(x, request, tuple, target));
    out.push_back(TupleProbability{tuple, 0.0});
    // Next nondecreasing index tuple.
    size_t j = m;
    while (j > 0 && idx[j - 1] == grid.size() - 1) --j;
    if (j == 0) break;
    ++idx[j - 1];
    for (size_t k = j; k < m; ++k) idx[k] = idx[j - 1];
  }
  const double max_lw = *std::max_element(log_weights.begin(), log_weights.end());
  double total = 0.0;
  for (size_t i = 0; i < out.size(); ++i) {
    out[i].probability = std::exp(log_weights[i] - max_lw);
    total += out[i].probability;
  }
  for (TupleProbability& tp : out) tp.probability /= total;
  return out;
}

absl::StatusOr<std::vector<double>> JointExpOracle(
    std::span<const double> grid, const SortedDataset& x,
    const QuantileRequest& request, double epsilon, RandomSource& rng,
    JointExpTarget target) {
  absl::StatusOr<std::vector<TupleProbability>> dist =
      JointExpDistribution(grid, x, request, epsilon, target);
  if (!dist.ok()) return dist.status();
  const double u = rng.Uniform();
  double cumulative = 0.0;
  for (const TupleProbability& tp : *dist) {
    cumulative += tp.probability;
    if (cumulative > u) return tp.tuple;
  }
  return dist->back().tuple;
}

}  // namespace dpq
