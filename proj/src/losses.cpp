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

#include "fairbound/losses.hpp"

#include <stdexcept>

#include "fairbound/metrics.hpp"

namespace fairbound {

double LogisticLoss::operator()(const Vector& theta, Vector* gradient) const {
  const Index d = x_.cols();
  const auto t = theta.head(d);
  const Vector margins = y_.cwiseProduct(x_ * t);
  double value = 0.0;
  Vector weights(margins.size());
  for (Index i = 0; i < margins.size(); ++i) {
    value += log1p_exp_neg(margins[i]);
    weights[i] = -y_[i] * sigmoid_neg(margins[i]);
  }
  value += 0.5 * l2_ * t.squaredNorm();
  if (gradient) {
    gradient->setZero(theta.size());
    gradient->head(d) = x_.transpose() * weights + l2_ * t;
  }
  return value;
}

Vector LogisticLoss::per_point(const Vector& theta) const {
  const Vector margins = y_.cwiseProduct(x_ * theta.head(x_.cols()));
  return margins.unaryExpr([](double m) { return log1p_exp_neg(m); });
}

optim::ConvexConstraintBlock per_point_loss_block(const Matrix& x, const Vector& y,
                                                  std::vector<Index> rows,
                                                  Vector bounds, Index dimension) {
  if (static_cast<Index>(rows.size()) != bounds.size())
    throw std::invalid_argument("one bound per constrained row required");
  Matrix xs(static_cast<Index>(rows.size()), x.cols());
  Vector ys(static_cast<Index>(rows.size()));
  for (Index r = 0; r < xs.rows(); ++r) {
    xs.row(r) = x.row(rows[static_cast<std::size_t>(r)]);
    ys[r] = y[rows[static_cast<std::size_t>(r)]];
  }
  const Index d = x.cols();
  optim::ConvexConstraintBlock block;
  block.size = xs.rows();
  block.evaluate = [xs = std::move(xs), ys = std::move(ys), bounds = std::move(bounds), d,
                    dimension](const Vector& v, Vector& values, Matrix* jacobian) {
    const Vector margins = ys.cwiseProduct(xs * v.head(d));
    values.resize(margins.size());
    for (Index i = 0; i < margins.size(); ++i) values[i] = log1p_exp_neg(margins[i]) - bounds[i];
    if (jacobian) {
      jacobian->setZero(margins.size(), dimension);
      for (Index i = 0; i < margins.size(); ++i)
        jacobian->row(i).head(d) = (-ys[i] * sigmoid_neg(margins[i])) * xs.row(i);
    }
  };
  return block;
}

optim::ConvexConstraintBlock total_loss_block(const Matrix& x, const Vector& y,
                                             double bound, Index dimension, double l2) {
  optim::ConvexConstraintBlock block;
  block.size = 1;
  block.evaluate = [&x, &y, bound, dimension, l2](const Vector& v, Vector& values,
                                                  Matrix* jacobian) {
    LogisticLoss loss(x, y, l2);
    Vector grad;
    values.resize(1);
    values[0] = loss(v, jacobian ? &grad : nullptr) - bound;
    if (jacobian) {
      jacobian->setZero(1, dimension);
      jacobian->row(0).head(x.cols()) = grad.head(x.cols()).transpose();
    }
  };
  return block;
}

Matrix covariance_directions(const Matrix& sensitive, const Matrix& x) {
  Matrix a(x.cols(), sensitive.cols());
  for (Index k = 0; k < sensitive.cols(); ++k) a.col(k) = covariance_direction(sensitive.col(k), x);
  return a;
}

}  // namespace fairbound
