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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace fairbound {

struct KernelSpec {
  enum class Kind { linear, rbf };
  Kind kind = Kind::rbf;
  // exp(-rbf_gamma ||x - x'||^2); 0 means "choose from the training data".
  double rbf_gamma = 0.0;

  void validate() const {
    if (kind == Kind::rbf && !(rbf_gamma > 0.0))
      throw std::invalid_argument("rbf_gamma must be positive");
  }
};

std::string to_string(KernelSpec::Kind kind);
KernelSpec::Kind kernel_kind_from_string(const std::string& name);

/// K(i, j) = k(a_i, b_j) for row sets a and b.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> gram_matrix(
    const KernelSpec& spec, const Eigen::MatrixBase<DerivedA>& a,
    const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (a.cols() != b.cols()) throw std::invalid_argument("kernel inputs differ in width");
  Mat k = a * b.transpose();
  if (spec.kind == KernelSpec::Kind::linear) return k;
  spec.validate();
  const auto na = a.rowwise().squaredNorm().eval();
  const auto nb = b.rowwise().squaredNorm().eval();
  for (Eigen::Index j = 0; j < k.cols(); ++j)
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
      const Scalar dist = std::max(Scalar(0), na[i] + nb[j] - Scalar(2) * k(i, j));
      k(i, j) = std::exp(-Scalar(spec.rbf_gamma) * dist);
    }
  return k;
}

/// 1 / (d * var) where var is the variance of all entries of the columns that
/// are not constant (a bias column carries no distance information).
template <typename Derived>
double default_rbf_gamma(const Eigen::MatrixBase<Derived>& x) {
  double sum = 0.0, sum_sq = 0.0;
  Eigen::Index count = 0, columns = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto col = x.col(j);
    if ((col.array() == col[0]).all()) continue;
    ++columns;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      sum += col[i];
      sum_sq += col[i] * col[i];
      ++count;
    }
  }
  if (columns == 0) return 1.0;
  const double mean = sum / static_cast<double>(count);
  const double var = sum_sq / static_cast<double>(count) - mean * mean;
  return var > 0.0 ? 1.0 / (static_cast<double>(columns) * var) : 1.0;
}

}  // namespace fairbound
