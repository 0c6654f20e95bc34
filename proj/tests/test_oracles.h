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
// Reference computations shared by the unit tests and the acceptance binary.
// Everything here is written by direct counting, independently of the code
// under test.

#ifndef DPQ_TESTS_TEST_ORACLES_H_
#define DPQ_TESTS_TEST_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dpq/expmech.h"

namespace dpq::testing {

inline double TotalVariation(const std::vector<double>& a,
                             const std::vector<double>& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return 0.5 * sum;
}

// Number of points strictly below v, by linear scan.
inline int64_t CountBelowByScan(std::span<const double> points, double v) {
  int64_t count = 0;
  for (double x : points) count += x < v;
  return count;
}

// Mechanism output mass per gap on an integer domain (0, width) with integer
// data points: the domain is cut into `per_unit` equal cells per unit length,
// the utility of each cell midpoint is found by scanning the data, the
// brute-force softmax is taken over the midpoints and mass is summed per gap.
inline std::vector<double> GapMassOnMidpointGrid(
    int width, std::span<const double> points, double q, double epsilon,
    int per_unit) {
  const int64_t target =
      static_cast<int64_t>(std::floor(q * static_cast<double>(points.size())));
  std::vector<double> grid;
  std::vector<double> utilities;
  for (int c = 0; c < width * per_unit; ++c) {
    const double mid = (c + 0.5) / per_unit;
    grid.push_back(mid);
    utilities.push_back(
        -static_cast<double>(std::abs(CountBelowByScan(points, mid) - target)));
  }
  const std::vector<double> probs =
      BruteForceEmOracle(grid, utilities, epsilon).value();
  std::vector<double> mass(points.size() + 1, 0.0);
  for (size_t i = 0; i < grid.size(); ++i) {
    mass[CountBelowByScan(points, grid[i])] += probs[i];
  }
  return mass;
}

// Counts of m-multisets from g items, C(g + m - 1, m), by Pascal's rule.
inline uint64_t MultisetCount(size_t g, size_t m) {
  std::vector<std::vector<uint64_t>> c(g + m, std::vector<uint64_t>(m + 1, 0));
  for (size_t i = 0; i < g + m; ++i) {
    c[i][0] = 1;
    for (size_t j = 1; j <= std::min(i, m); ++j) {
      c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0);
    }
  }
  return c[g + m - 1][m];
}

}  // namespace dpq::testing

#endif  // DPQ_TESTS_TEST_ORACLES_H_
