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

#include <cmath>
#include <span>
#include <vector>

#include "fairbound/dataset.hpp"
#include "fairbound/optim.hpp"

namespace fairbound {

// log(1 + exp(-m)) without overflow.
inline double log1p_exp_neg(double m) {
  return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

// 1 / (1 + exp(m)).
inline double sigmoid_neg(double m) {
  if (m >= 0.0) {
    const double e = std::exp(-m);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(m));
}

/// Negative log-likelihood of logistic regression,
///   sum_i log(1 + exp(-y_i theta^T x_i)) + (l2 / 2) ||theta||^2.
class LogisticLoss {
 public:
  LogisticLoss(const Matrix& x, const Vector& y, double l2 = 0.0)
      : x_(x), y_(y), l2_(l2) {}

  double operator()(const Vector& theta, Vector* gradient) const;

  // L_i(theta) = -log p(y_i | x_i, theta), no regularization.
  Vector per_point(const Vector& theta) const;

 private:
  const Matrix& x_;
  const Vector& y_;
  double l2_;
};

/// Per-point loss constraints L_i(theta) - bound_i <= 0 for the given rows.
/// The variable vector may be longer than the feature dimension (epigraph
/// variables are appended); the extra coordinates get zero Jacobian entries.
optim::ConvexConstraintBlock per_point_loss_block(const Matrix& x, const Vector& y,
                                                  std::vector<Index> rows,
                                                  Vector bounds, Index dimension);

/// Total-loss constraint L(theta) + (l2 / 2) ||theta||^2 - bound <= 0 (one
/// row). The matrices are captured by reference.
optim::ConvexConstraintBlock total_loss_block(const Matrix& x, const Vector& y,
                                             double bound, Index dimension, double l2 = 0.0);

/// Covariance directions a_k (one column per sensitive column):
///   cov_k(theta) = a_k^T theta.
Matrix covariance_directions(const Matrix& sensitive, const Matrix& x);

}  // namespace fairbound
