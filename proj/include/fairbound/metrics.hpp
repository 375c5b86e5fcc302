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
#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fairbound/dataset.hpp"

namespace fairbound {

/// Empirical covariance between a sensitive column and signed distances,
///   (1/N) sum_i (z_i - mean(z)) d_i.
/// Shifting d by a constant leaves the value unchanged.
template <typename DerivedZ, typename DerivedD>
typename DerivedD::Scalar boundary_covariance(
    const Eigen::MatrixBase<DerivedZ>& z, const Eigen::MatrixBase<DerivedD>& d) {
  using Scalar = typename DerivedD::Scalar;
  if (z.size() != d.size()) throw std::invalid_argument("z and d differ in length");
  if (z.size() == 0) throw std::invalid_argument("boundary_covariance needs N >= 1");
  const auto zc = (z.derived().array().template cast<Scalar>() -
                   z.derived().template cast<Scalar>().mean());
  return (zc * d.derived().array()).sum() / static_cast<Scalar>(d.size());
}

/// Coefficients a with boundary_covariance(z, X theta) = a^T theta.
template <typename DerivedZ, typename DerivedX>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> covariance_direction(
    const Eigen::MatrixBase<DerivedZ>& z, const Eigen::MatrixBase<DerivedX>& x) {
  using Scalar = typename DerivedX::Scalar;
  if (z.size() != x.rows()) throw std::invalid_argument("z and X differ in row count");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> zc =
      z.derived().template cast<Scalar>().array() - z.derived().template cast<Scalar>().mean();
  return x.derived().transpose() * zc / static_cast<Scalar>(x.rows());
}

/// Positive-outcome rates of the two groups of a binary sensitive column.
/// A prediction counts as positive when it is >= 0 (covers both {-1,+1}
/// predictions and raw distances with the tie at 0 going positive).
struct GroupRates {
  double rate_z1 = 0.0;  // P(positive | z = 1)
  double rate_z0 = 0.0;  // P(positive | z = 0)
  Index n_z1 = 0;
  Index n_z0 = 0;
};

template <typename DerivedP, typename DerivedZ>
GroupRates group_rates(const Eigen::MatrixBase<DerivedP>& predictions,
                       const Eigen::MatrixBase<DerivedZ>& z) {
  if (predictions.size() != z.size())
    throw std::invalid_argument("predictions and z differ in length");
  GroupRates g;
  Index pos1 = 0, pos0 = 0;
  for (Index i = 0; i < z.size(); ++i) {
    const bool positive = predictions.derived().coeff(i) >= 0;
    if (z.derived().coeff(i) == 1) {
      ++g.n_z1;
      pos1 += positive;
    } else {
      ++g.n_z0;
      pos0 += positive;
    }
  }
  if (g.n_z1 == 0 || g.n_z0 == 0)
    throw std::invalid_argument("a sensitive group has no members");
  g.rate_z1 = static_cast<double>(pos1) / static_cast<double>(g.n_z1);
  g.rate_z0 = static_cast<double>(pos0) / static_cast<double>(g.n_z0);
  return g;
}

// 100 * min(r1/r0, r0/r1). Exactly one zero rate gives 0, two give 100.
inline double p_percent_from_rates(const GroupRates& g) {
  if (g.rate_z1 == 0.0 && g.rate_z0 == 0.0) return 100.0;
  if (g.rate_z1 == 0.0 || g.rate_z0 == 0.0) return 0.0;
  return 100.0 * std::min(g.rate_z1 / g.rate_z0, g.rate_z0 / g.rate_z1);
}

inline double cv_score_from_rates(const GroupRates& g) {
  return std::abs(g.rate_z0 - g.rate_z1);
}

template <typename DerivedP, typename DerivedZ>
double p_percent_rule(const Eigen::MatrixBase<DerivedP>& predictions,
                      const Eigen::MatrixBase<DerivedZ>& z) {
  return p_percent_from_rates(group_rates(predictions, z));
}

template <typename DerivedP, typename DerivedZ>
double cv_score(const Eigen::MatrixBase<DerivedP>& predictions,
                const Eigen::MatrixBase<DerivedZ>& z) {
  return cv_score_from_rates(group_rates(predictions, z));
}

/// Fairness audit of one model on one evaluation set, one entry per
/// sensitive column (one-hot columns are scored value-vs-rest).
struct FairnessReport {
  std::vector<std::string> columns;
  std::vector<double> covariance;
  std::vector<double> p_percent;
  std::vector<double> cv_score;
  std::vector<GroupRates> rates;
};

FairnessReport audit(const Vector& distances, const Dataset& dataset);
FairnessReport audit(const Vector& distances, const Matrix& sensitive,
                     const std::vector<std::string>& names);

// Fraction of rows where sign(distance) (tie -> +1) equals the label.
double accuracy(const Vector& distances, const Vector& labels);

}  // namespace fairbound
