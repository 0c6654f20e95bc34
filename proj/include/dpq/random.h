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
#ifndef DPQ_RANDOM_H_
#define DPQ_RANDOM_H_

#include <cstdint>
#include <limits>
#include <random>

namespace dpq {

// Seedable 64-bit generator. Satisfies UniformRandomBitGenerator so it can
// drive <random> distributions and <algorithm> shuffles directly.
//
class RandomSource {
 public:
  using result_type = uint64_t;

  explicit RandomSource(uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  // Uniform on the open interval (0, 1).
  double OpenUniform();

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer over the pair (a, b).
uint64_t MixSeed(uint64_t a, uint64_t b);

// Draws from Laplace(0, scale). scale == 0 returns 0.
double SampleLaplace(double scale, RandomSource& rng);

}  // namespace dpq

#endif  // DPQ_RANDOM_H_
