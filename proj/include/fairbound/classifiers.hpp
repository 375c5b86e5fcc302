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

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fairbound/dataset.hpp"
#include "fairbound/kernel.hpp"
#include "fairbound/optim.hpp"

namespace fairbound {

enum class ClassifierKind { logreg, linear_svm, kernel_svm };

enum class TrainingMode {
  unconstrained,
  fairness_constrained,  // min loss s.t. |cov_k| <= c_k
  accuracy_constrained,  // min sum_k |cov_k| s.t. L <= (1 + gamma) L*
  fine_grained,          // min sum_k |cov_k| s.t. per-point loss / non-flip rows
};

// Linear SVM data term: max(0, 1 - m) solved exactly through the dual QP, or
// max(0, 1 - m)^2 solved in the primal by the smooth solver.
enum class SvmLoss { hinge, squared_hinge };

std::string to_string(ClassifierKind kind);
std::string to_string(SvmLoss loss);
SvmLoss svm_loss_from_string(const std::string& name);
std::string to_string(TrainingMode mode);
ClassifierKind classifier_from_string(const std::string& name);
TrainingMode mode_from_string(const std::string& name);

struct FitSpec {
  TrainingMode mode = TrainingMode::unconstrained;
  // fairness_constrained: one threshold per sensitive column. +inf drops
  // the constraint for that column.
  Vector covariance_thresholds;
  // accuracy_constrained.
  std::optional<double> gamma;
  // fine_grained: one allowance per training row (+inf leaves the row free)
  // and the rows that must keep d(x) >= 0.
  Vector per_point_gammas;
  std::vector<Index> protected_indices;
  double svm_cost = 1.0;
  SvmLoss svm_loss = SvmLoss::squared_hinge;
  double l2_penalty = 0.0;
  KernelSpec kernel;
  optim::SolverSettings solver;

  // Mode-specific fields must be present exactly when the mode needs them.
  void validate(Index rows, Index sensitive_columns) const;
};

struct TrainingMeta {
  ClassifierKind classifier = ClassifierKind::logreg;
  TrainingMode mode = TrainingMode::unconstrained;
  Vector thresholds;
  std::optional<double> gamma;
  optim::SolverStatus status = optim::SolverStatus::max_iter;
  bool converged = false;
  // Set when an unregularized logistic fit was unbounded (separable data)
  // and a 1e-8 ridge was switched on.
  bool auto_ridge = false;
  double l2_penalty = 0.0;
  // Value of the optimized objective: the loss for unconstrained and
  // fairness_constrained fits, sum_k |cov_k| for the two others.
  double objective = 0.0;
  // Training loss (negative log-likelihood incl. ridge, or SVM primal / dual).
  double loss = 0.0;
  // L(theta*) of the unconstrained baseline (epigraph modes only).
  double reference_loss = std::numeric_limits<double>::quiet_NaN();
  double svm_cost = 0.0;
  optim::KktResiduals kkt;
  int iterations = 0;
};

/// d(x) = theta^T x; the bias (when present) is the last coordinate.
struct LinearModel {
  Vector theta;
  TrainingMeta meta;
};

/// d(x) = sum_j alpha_j y_j k(x, x_j) + intercept over the support rows.
struct KernelModel {
  Vector alphas;
  Matrix support_points;
  Vector support_labels;
  KernelSpec kernel;
  double svm_cost = 1.0;
  double intercept = 0.0;
  TrainingMeta meta;
};

using Model = std::variant<LinearModel, KernelModel>;

/// Unregularized-by-default logistic regression.
LinearModel fit_logreg(const Dataset& train, const FitSpec& spec);

/// Logistic regression with |cov_k(theta)| <= c_k.
LinearModel fit_logreg_fair(const Dataset& train, const FitSpec& spec);

/// Minimizes sum_k |cov_k| subject to L(theta) <= (1 + gamma) L(theta*).
/// `baseline` is the unconstrained fit on `train`; computed when null.
LinearModel fit_logreg_fairness_max(const Dataset& train, const FitSpec& spec,
                                    const LinearModel* baseline = nullptr);

/// Minimizes sum_k |cov_k| subject to theta^T x_i >= 0 on
/// spec.protected_indices and L_i(theta) <= (1 + gamma_i) L_i(theta*) on the
/// remaining rows.
LinearModel fit_logreg_fine_grained(const Dataset& train, const FitSpec& spec,
                                    const LinearModel* baseline = nullptr);

/// min ||theta||^2 + C sum_i l(y_i theta^T x_i) s.t. |cov_k| <= c_k with l
/// the hinge (dual QP) or squared hinge (primal). The bias column is
/// regularized.
LinearModel fit_linear_svm_fair(const Dataset& train, const FitSpec& spec);

/// Soft-margin kernel SVM dual with covariance constraints on g_alpha.
KernelModel fit_kernel_svm_fair(const Dataset& train, const FitSpec& spec);

/// Dispatch on classifier and spec.mode. The logistic epigraph modes reuse
/// `baseline` when given.
Model fit(ClassifierKind kind, const Dataset& train, const FitSpec& spec,
          const LinearModel* baseline = nullptr);

Vector decision_values(const LinearModel& model, const Matrix& x);
Vector decision_values(const KernelModel& model, const Matrix& x);
Vector decision_values(const Model& model, const Matrix& x);

// +1 where d >= 0, -1 elsewhere.
Vector predict(const Vector& distances);
template <typename M>
Vector predict(const M& model, const Matrix& x) {
  return predict(decision_values(model, x));
}

const TrainingMeta& meta(const Model& model);

/// ||theta||^2 + C sum_i l(y_i theta^T x_i).
double svm_primal_objective(const Vector& theta, const Matrix& x, const Vector& y, double cost,
                            SvmLoss loss = SvmLoss::hinge);

}  // namespace fairbound
