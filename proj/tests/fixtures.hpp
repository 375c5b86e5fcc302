// Copyright 2026 The fairbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Small hand-built datasets shared by the classifier tests and the
// acceptance runner.

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "fairbound/dataset.hpp"

namespace fairbound::testing_oracles {

// N rows of (x1, bias) with noisy labels and a binary z that leans on x1, so
// the covariance constraint is active at small thresholds.
inline Dataset small_instance(std::uint64_t seed, Index n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix x(n, 2);
  Vector y(n);
  Matrix z(n, 1);
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = g(rng);
    x(i, 1) = 1.0;
    y[i] = x(i, 0) + 0.8 * g(rng) + 0.2 > 0.0 ? 1.0 : -1.0;
    z(i, 0) = u(rng) < 1.0 / (1.0 + std::exp(-2.0 * x(i, 0))) ? 1.0 : 0.0;
  }
  // Both groups must be present.
  z(0, 0) = 1.0;
  z(1, 0) = 0.0;
  return Dataset(x, y, z, {"x1", "bias"}, {"z"}, true);
}

// Two points (+1, bias) -> +1 and (-1, bias) -> -1.
inline Dataset symmetric_pair() {
  Matrix x{{1.0, 1.0}, {-1.0, 1.0}};
  Vector y{{1.0, -1.0}};
  Matrix z{{1.0}, {0.0}};
  return Dataset(x, y, z, {"x1", "bias"}, {"z"}, true);
}

// XOR corners, + on the off-diagonal.
inline Dataset xor_corners() {
  Matrix x{{0.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}};
  Vector y{{-1.0, -1.0, 1.0, 1.0}};
  Matrix z{{1.0}, {0.0}, {1.0}, {0.0}};
  return Dataset(x, y, z, {"x1", "x2"}, {"z"}, false);
}

}  // namespace fairbound::testing_oracles
