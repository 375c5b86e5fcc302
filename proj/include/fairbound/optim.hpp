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

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fairbound/dataset.hpp"

namespace fairbound::optim {

struct SolverSettings {
  int max_iterations = 10000;
  double objective_tolerance = 1e-7;
  double kkt_tolerance = 1e-5;
  // Max constraint violation accepted at exit; <= 0 means kkt_tolerance.
  double primal_tolerance = 0.0;
  int verbosity = 0;

  void validate() const;
  double feasibility_target() const {
    return primal_tolerance > 0.0 ? primal_tolerance : kkt_tolerance;
  }
};

enum class SolverStatus { converged, max_iter, infeasible };

std::string to_string(SolverStatus status);

struct KktResiduals {
  double stationarity = 0.0;      // ||grad f + J^T lambda||_2
  double primal_violation = 0.0;  // max_j max(g_j, 0)
  double complementarity = 0.0;   // max_j |lambda_j g_j|
};

struct SolverResult {
  Vector point;
  double objective_value = 0.0;
  SolverStatus status = SolverStatus::max_iter;
  KktResiduals kkt;
  // Smooth problems: linear rows first, then convex blocks in order.
  // QPs: the equality multiplier (if any) first, then inequality rows.
  Vector multipliers;
  int iterations = 0;
};

/// f(x); fills *gradient when non-null.
using SmoothFunction = std::function<double(const Vector& x, Vector* gradient)>;

/// Vector-valued g(x) with g(x) <= 0 meaning feasible; fills the Jacobian
/// (one row per component) when non-null.
using ConstraintFunction =
    std::function<void(const Vector& x, Vector& values, Matrix* jacobian)>;

struct ConvexConstraintBlock {
  Index size = 0;
  ConstraintFunction evaluate;
};

/// minimize f(x) subject to A x <= b and g_k(x) <= 0 for every convex block.
struct SmoothProblem {
  Index dimension = 0;
  SmoothFunction objective;
  Matrix linear_lhs;  // m x n
  Vector linear_rhs;  // m
  std::vector<ConvexConstraintBlock> convex;
  Vector initial_point;
  // A point known to satisfy every constraint. When the multiplier method
  // leaves a residual violation above the target, the answer is pulled back
  // along the segment towards this point (the feasible set is convex).
  std::optional<Vector> feasible_anchor;

  Index constraint_count() const;
  // All constraint values, stacked in multiplier order.
  Vector constraint_values(const Vector& x, Matrix* jacobian = nullptr) const;
};

/// Augmented-Lagrangian outer loop with a BFGS inner solve. Deterministic.
SolverResult minimize_smooth(const SmoothProblem& problem,
                             const SolverSettings& settings = {});

/// Stationarity / feasibility / complementary slackness of a candidate pair.
/// Throws std::invalid_argument on a negative multiplier.
KktResiduals kkt_residuals(const SmoothProblem& problem, const Vector& point,
                           const Vector& multipliers);

/// Hessian of a convex quadratic, either dense or as Q = F^T F.
class QuadraticForm {
 public:
  static QuadraticForm dense(Matrix q);
  static QuadraticForm factored(Matrix f);

  bool is_factored() const { return factored_; }
  Index size() const { return factored_ ? data_.cols() : data_.rows(); }
  const Matrix& matrix() const { return data_; }
  Vector apply(const Vector& x) const;
  double diagonal(Index i) const;

 private:
  QuadraticForm(Matrix data, bool factored) : data_(std::move(data)), factored_(factored) {}
  Matrix data_;
  bool factored_ = false;
};

struct LinearEquality {
  Vector coefficients;
  double rhs = 0.0;
};

/// minimize 1/2 x^T Q x + q^T x
/// subject to lower <= x <= upper, optional e^T x = rhs, A x <= b.
struct QuadraticProblem {
  QuadraticForm hessian = QuadraticForm::dense(Matrix());
  Vector linear;
  Vector lower;
  Vector upper;  // may hold +infinity
  std::optional<LinearEquality> equality;
  Matrix inequality_lhs;  // m x n (may have zero rows)
  Vector inequality_rhs;
  Vector initial_point;  // empty: 0; projected onto the box either way

  Index size() const { return linear.size(); }
  double objective(const Vector& x) const;
  void validate() const;  // dimensions, symmetry and PSD of a dense Hessian
};

/// Box-constrained coordinate descent inside an augmented-Lagrangian loop for
/// the equality and inequality rows. Starts from the projection of
/// `initial_point` (or 0) onto the box. Deterministic.
SolverResult solve_qp(const QuadraticProblem& problem,
                      const SolverSettings& settings = {});

/// KKT residuals of a QP point; box multipliers are recovered from the
/// gradient sign. `multipliers` follows the SolverResult ordering.
KktResiduals kkt_residuals(const QuadraticProblem& problem, const Vector& point,
                           const Vector& multipliers);

}  // namespace fairbound::optim
