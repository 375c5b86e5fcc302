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

#include "fairbound/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace fairbound {
namespace {

Gaussian2 make(double m0, double m1, double a, double b, double c, double d) {
  Gaussian2 g;
  g.mean << m0, m1;
  g.covariance << a, b, c, d;
  g.covariance = 0.5 * (g.covariance + g.covariance.transpose()).eval();
  return g;
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  Eigen::Vector2d draw(const Gaussian2& g) {
    const Eigen::Matrix2d l = g.covariance.llt().matrixL();
    Eigen::Vector2d e;
    e << normal_(rng_), normal_(rng_);
    return g.mean + l * e;
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

struct Draws {
  Matrix x;
  Vector y;
  Matrix z;
  Eigen::VectorXi beta;
};

Draws draw(const SynthConfig& config, bool nonlinear) {
  config.validate();
  Sampler s(config.seed);
  Draws out;
  out.x.resize(config.n, 2);
  out.y.resize(config.n);
  out.z.resize(config.n, 1);
  out.beta = Eigen::VectorXi::Zero(config.n);
  for (Index i = 0; i < config.n; ++i) {
    const bool positive = s.coin(0.5);
    Eigen::Vector2d x;
    if (nonlinear) {
      const bool beta = s.coin(0.5);
      out.beta[i] = beta ? 1 : 0;
      x = s.draw(nonlinear_component(positive, beta));
    } else {
      x = s.draw(positive ? linear_positive_component() : linear_negative_component());
    }
    out.x.row(i) = x.transpose();
    out.y[i] = positive ? 1.0 : -1.0;
    out.z(i, 0) = s.coin(sensitive_probability(x, config.phi)) ? 1.0 : 0.0;
  }
  return out;
}

Dataset to_dataset(Draws d) {
  return Dataset(std::move(d.x), std::move(d.y), std::move(d.z), {"x1", "x2"}, {"z"}, false,
                 {0, 1});
}

}  // namespace

void SynthConfig::validate() const {
  if (n < 2) throw std::invalid_argument("synthetic sample count must be >= 2");
  if (!(phi > 0.0 && phi <= std::numbers::pi / 2.0))
    throw std::invalid_argument("phi must lie in (0, pi/2]");
}

std::string to_string(SynthConfig::Variant variant) {
  return variant == SynthConfig::Variant::linear ? "linear" : "nonlinear";
}

SynthConfig::Variant variant_from_string(const std::string& name) {
  if (name == "linear") return SynthConfig::Variant::linear;
  if (name == "nonlinear") return SynthConfig::Variant::nonlinear;
  throw std::invalid_argument("unknown synthetic variant: " + name);
}

const Gaussian2& linear_positive_component() {
  static const Gaussian2 g = make(2, 2, 5, 1, 1, 5);
  return g;
}

const Gaussian2& linear_negative_component() {
  static const Gaussian2 g = make(-2, -2, 10, 1, 1, 3);
  return g;
}

const Gaussian2& nonlinear_component(bool positive, bool beta) {
  static const Gaussian2 pos1 = make(2, 2, 5, 1, 1, 5);
  static const Gaussian2 pos0 = make(-2, -2, 10, 1, 1, 3);
  static const Gaussian2 neg1 = make(4, -4, 4, 4, 2, 5);
  static const Gaussian2 neg0 = make(-4, 6, 6, 2, 2, 3);
  if (positive) return beta ? pos1 : pos0;
  return beta ? neg1 : neg0;
}

namespace {

double log_density(const Gaussian2& g, const Eigen::Vector2d& x) {
  const Eigen::Vector2d diff = x - g.mean;
  const double quad = diff.dot(g.covariance.inverse() * diff);
  return -0.5 * quad - std::log(2.0 * std::numbers::pi) - 0.5 * std::log(g.covariance.determinant());
}

}  // namespace

double density(const Gaussian2& g, const Eigen::Vector2d& x) { return std::exp(log_density(g, x)); }

double sensitive_probability(const Eigen::Vector2d& x, double phi) {
  Eigen::Matrix2d r;
  r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  const Eigen::Vector2d xr = r * x;
  const double gap =
      log_density(linear_negative_component(), xr) - log_density(linear_positive_component(), xr);
  return 1.0 / (1.0 + std::exp(gap));
}

Dataset gen_linear_synthetic(const SynthConfig& config) {
  if (config.variant != SynthConfig::Variant::linear)
    throw std::invalid_argument("config variant is not linear");
  return to_dataset(draw(config, false));
}

Dataset gen_nonlinear_synthetic(const SynthConfig& config) {
  if (config.variant != SynthConfig::Variant::nonlinear)
    throw std::invalid_argument("config variant is not nonlinear");
  return to_dataset(draw(config, true));
}

Dataset generate(const SynthConfig& config) {
  return config.variant == SynthConfig::Variant::linear ? gen_linear_synthetic(config)
                                                         : gen_nonlinear_synthetic(config);
}

Eigen::VectorXi nonlinear_mixture_indicators(const SynthConfig& config) {
  return draw(config, true).beta;
}

}  // namespace fairbound
