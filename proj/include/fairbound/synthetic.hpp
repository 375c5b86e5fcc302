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

#pragma once

#include <cstdint>
#include <numbers>
#include <string>

#include <Eigen/Core>

#include "fairbound/dataset.hpp"

namespace fairbound {

struct Gaussian2 {
  Eigen::Vector2d mean;
  Eigen::Matrix2d covariance;
};

struct SynthConfig {
  enum class Variant { linear, nonlinear };
  Index n = 4000;
  double phi = std::numbers::pi / 4.0;
  std::uint64_t seed = 0;
  Variant variant = Variant::linear;

  // Throws std::invalid_argument unless n >= 2 and 0 < phi <= pi/2.
  void validate() const;
};

std::string to_string(SynthConfig::Variant variant);
SynthConfig::Variant variant_from_string(const std::string& name);

/// Class-conditional Gaussians of the linear variant.
const Gaussian2& linear_positive_component();  // N([2;2],  [5 1;1 5])
const Gaussian2& linear_negative_component();  // N([-2;-2], [10 1;1 3])
/// Mixture components of the nonlinear variant, y = +1 then y = -1, each as
/// (beta = 1 component, beta = 0 component). Covariances are symmetrized.
const Gaussian2& nonlinear_component(bool positive, bool beta);

/// Exact bivariate normal density.
double density(const Gaussian2& g, const Eigen::Vector2d& x);

/// P(z = 1 | x) = p(x'|y=1) / (p(x'|y=1) + p(x'|y=-1)) with x' = R(phi) x,
/// using the linear variant's class conditionals.
double sensitive_probability(const Eigen::Vector2d& x, double phi);

/// Labels uniform over {-1, +1}; two feature columns "x1", "x2" (no bias);
/// one sensitive column "z".
Dataset gen_linear_synthetic(const SynthConfig& config);
Dataset gen_nonlinear_synthetic(const SynthConfig& config);
Dataset generate(const SynthConfig& config);

/// Per-row mixture indicator beta of the nonlinear variant (same draws as
/// gen_nonlinear_synthetic).
Eigen::VectorXi nonlinear_mixture_indicators(const SynthConfig& config);

}  // namespace fairbound
