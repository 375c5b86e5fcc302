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

#include "fairbound/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "fairbound/losses.hpp"
#include "fairbound/metrics.hpp"

namespace fairbound {
namespace {

constexpr double kAutoRidge = 1e-8;
// Absolute relaxation of the per-point loss bounds so that the unconstrained
// optimum stays strictly feasible.
constexpr double kPointSlack = 1e-10;

using optim::SmoothProblem;
using optim::SolverResult;
using optim::SolverStatus;

bool is_finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

void fill_status(TrainingMeta& meta, const SolverResult& r) {
  meta.status = r.status;
  meta.converged = r.status == SolverStatus::converged;
  meta.kkt = r.kkt;
  meta.iterations = r.iterations;
}

// Rows a_k^T theta <= c_k and -a_k^T theta <= c_k for every finite c_k.
void covariance_rows(const Matrix& directions, const Vector& thresholds, Index dimension,
                     Matrix& lhs, Vector& rhs) {
  std::vector<Index> active;
  for (Index k = 0; k < thresholds.size(); ++k)
    if (std::isfinite(thresholds[k])) active.push_back(k);
  const Index m = static_cast<Index>(active.size());
  lhs.setZero(2 * m, dimension);
  rhs.resize(2 * m);
  for (Index r = 0; r < m; ++r) {
    const Index k = active[static_cast<std::size_t>(r)];
    lhs.row(2 * r).head(directions.rows()) = directions.col(k).transpose();
    lhs.row(2 * r + 1).head(directions.rows()) = -directions.col(k).transpose();
    rhs[2 * r] = thresholds[k];
    rhs[2 * r + 1] = thresholds[k];
  }
}

// Exact-hinge dual with the covariance multipliers mu_k = lambda+_k - lambda-_k
// moved outside the box QP. For fixed mu the alpha problem is a plain SVM
// dual; a_k^T theta(mu) is non-increasing in mu_k, so each mu_k comes from a
// bracketed false-position search. Coordinate descent on the joint (alpha,
// lambda) problem crawls once a constraint binds. The returned point is in
// the joint variables and certified against `full`.
SolverResult hinge_dual(const optim::QuadraticProblem& full, const Matrix& fa,
                        const Matrix& dirs, const optim::SolverSettings& settings) {
  const Index n = fa.cols();
  const Index m = dirs.cols();
  optim::SolverSettings inner_settings = settings;
  inner_settings.kkt_tolerance = 0.1 * settings.kkt_tolerance;
  // The primal objective moves by about mu_k times the constraint error, so
  // the roots are taken well below the KKT tolerance.
  const double root_tol = 1e-4 * settings.kkt_tolerance;
  optim::QuadraticProblem box;
  box.hessian = optim::QuadraticForm::factored(fa / std::sqrt(2.0));
  box.lower = full.lower.head(n);
  box.upper = full.upper.head(n);
  Vector c(m);
  for (Index k = 0; k < m; ++k) c[k] = full.linear[n + 2 * k];

  Vector mu = Vector::Zero(m);
  Vector alpha = Vector::Zero(n);
  int sweeps = 0;
  bool inner_ok = true;
  // a_k^T theta(mu) for every k; leaves the inner solution in `alpha`.
  auto evaluate = [&](const Vector& at) {
    box.linear = -Vector::Ones(n) - 0.5 * fa.transpose() * (dirs * at);
    box.initial_point = alpha;
    const SolverResult s = optim::solve_qp(box, inner_settings);
    sweeps += s.iterations;
    inner_ok = s.status == SolverStatus::converged;
    alpha = s.point;
    const Vector theta = 0.5 * (fa * alpha - dirs * at);
    return Vector(dirs.transpose() * theta);
  };

  // Every branch below ends with an evaluation at the accepted mu, so
  // `alpha` always matches `mu`.
  if (m == 0) evaluate(mu);
  for (int cycle = 0; cycle < 50 && m > 0; ++cycle) {
    bool changed = false;
    for (Index k = 0; k < m; ++k) {
      const double old = mu[k];
      Vector trial = mu;
      trial[k] = 0.0;
      const Vector h0 = evaluate(trial);
      if (std::abs(h0[k]) <= c[k]) {
        mu = trial;
      } else {
        // g(t) = a_k^T theta - target is non-increasing in t; find its root.
        const double sign = h0[k] > 0.0 ? 1.0 : -1.0;
        const double target = sign * c[k];
        auto g = [&](double t) {
          trial[k] = t;
          return evaluate(trial)[k] - target;
        };
        double lo = 0.0, glo = h0[k] - target;
        double step = 2.0 * std::abs(glo) / std::max(dirs.col(k).squaredNorm(), 1e-300);
        double hi = sign * step;
        double ghi = g(hi);
        for (int i = 0; i < 200 && ghi * sign > 0.0; ++i) {
          lo = hi;
          glo = ghi;
          step *= 2.0;
          hi = sign * step;
          ghi = g(hi);
        }
        double mid = hi, gmid = ghi;
        int side = 0;
        for (int i = 0; i < 200 && std::abs(gmid) > root_tol &&
                        std::abs(hi - lo) > 1e-14 * std::abs(hi);
             ++i) {
          mid = (lo * ghi - hi * glo) / (ghi - glo);
          gmid = g(mid);
          if ((gmid > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gmid;
            if (side == -1) ghi *= 0.5;
            side = -1;
          } else {
            hi = mid;
            ghi = gmid;
            if (side == 1) glo *= 0.5;
            side = 1;
          }
        }
        trial[k] = mid;
        mu = trial;
      }
      if (std::abs(mu[k] - old) > 1e-12 * std::max(1.0, std::abs(old))) changed = true;
    }
    if (!changed || m == 1) break;
  }

  Vector u(n + 2 * m);
  u.head(n) = alpha;
  for (Index k = 0; k < m; ++k) {
    u[n + 2 * k] = std::max(mu[k], 0.0);
    u[n + 2 * k + 1] = std::max(-mu[k], 0.0);
  }
  SolverResult r;
  r.point = u;
  r.objective_value = full.objective(u);
  r.iterations = sweeps;
  r.kkt = optim::kkt_residuals(full, u, Vector());
  const bool ok = inner_ok && r.kkt.primal_violation <= settings.feasibility_target() &&
                  r.kkt.stationarity <= settings.kkt_tolerance &&
                  r.kkt.complementarity <= settings.kkt_tolerance;
  r.status = ok ? SolverStatus::converged : SolverStatus::max_iter;
  return r;
}

double total_abs_covariance(const Matrix& directions, const Vector& theta) {
  return (directions.transpose() * theta).cwiseAbs().sum();
}

// Bisection on the segment anchor -> x for the point closest to x that
// satisfies `ok`. `ok(anchor)` must hold.
Vector pull_towards(const Vector& x, const Vector& anchor,
                    const std::function<bool(const Vector&)>& ok) {
  if (ok(x)) return x;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(anchor + mid * (x - anchor)) ? lo : hi) = mid;
  }
  return anchor + lo * (x - anchor);
}

struct LogisticSolve {
  SolverResult result;
  double l2 = 0.0;
  bool auto_ridge = false;
};

// Logistic loss with optional covariance rows; switches on a small ridge when
// the result certifies that the problem is unbounded: every training point is
// strictly correctly classified and the doubled parameter is still feasible,
// so the loss decreases without limit along that ray.
LogisticSolve solve_logistic(const Dataset& train, const FitSpec& spec, const Matrix& lhs,
                             const Vector& rhs) {
  const Matrix& x = train.features();
  const Vector& y = train.labels();
  const Index d = train.dim();
  auto run = [&](double l2) {
    LogisticLoss loss(x, y, l2);
    SmoothProblem p;
    p.dimension = d;
    p.objective = [loss](const Vector& t, Vector* g) { return loss(t, g); };
    p.linear_lhs = lhs;
    p.linear_rhs = rhs;
    p.initial_point = Vector::Zero(d);
    if (rhs.size() > 0 && (rhs.array() > 0.0).all()) p.feasible_anchor = Vector::Zero(d);
    return optim::minimize_smooth(p, spec.solver);
  };
  LogisticSolve out;
  out.l2 = spec.l2_penalty;
  out.result = run(out.l2);
  if (out.l2 == 0.0 && out.result.status != SolverStatus::infeasible) {
    const Vector& theta = out.result.point;
    const bool separates = (y.cwiseProduct(x * theta).array() > 0.0).all();
    const bool ray_feasible =
        rhs.size() == 0 ||
        ((lhs * (2.0 * theta) - rhs).array() <= spec.solver.feasibility_target()).all();
    if (separates && ray_feasible) {
      out.l2 = kAutoRidge;
      out.auto_ridge = true;
      out.result = run(out.l2);
    }
  }
  return out;
}

LinearModel baseline_or_fit(const Dataset& train, const FitSpec& spec,
                            const LinearModel* baseline) {
  if (baseline) {
    if (baseline->theta.size() != train.dim())
      throw std::invalid_argument("baseline model does not match the training features");
    return *baseline;
  }
  FitSpec plain;
  plain.mode = TrainingMode::unconstrained;
  plain.l2_penalty = spec.l2_penalty;
  plain.solver = spec.solver;
  return fit_logreg(train, plain);
}

void require_mode(const FitSpec& spec, std::initializer_list<TrainingMode> allowed,
                  const char* who) {
  for (const TrainingMode m : allowed)
    if (spec.mode == m) return;
  throw std::invalid_argument(std::string(who) + " does not support mode " +
                              to_string(spec.mode));
}

}  // namespace

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::logreg: return "logreg";
    case ClassifierKind::linear_svm: return "linear_svm";
    case ClassifierKind::kernel_svm: return "kernel_svm";
  }
  return "?";
}

std::string to_string(SvmLoss loss) {
  return loss == SvmLoss::hinge ? "hinge" : "squared_hinge";
}

SvmLoss svm_loss_from_string(const std::string& name) {
  if (name == "hinge") return SvmLoss::hinge;
  if (name == "squared_hinge") return SvmLoss::squared_hinge;
  throw std::invalid_argument("unknown svm loss: " + name);
}

std::string to_string(TrainingMode mode) {
  switch (mode) {
    case TrainingMode::unconstrained: return "unconstrained";
    case TrainingMode::fairness_constrained: return "fairness_constrained";
    case TrainingMode::accuracy_constrained: return "accuracy_constrained";
    case TrainingMode::fine_grained: return "fine_grained";
  }
  return "?";
}

ClassifierKind classifier_from_string(const std::string& name) {
  for (const ClassifierKind k :
       {ClassifierKind::logreg, ClassifierKind::linear_svm, ClassifierKind::kernel_svm})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown classifier: " + name);
}

TrainingMode mode_from_string(const std::string& name) {
  for (const TrainingMode m : {TrainingMode::unconstrained, TrainingMode::fairness_constrained,
                               TrainingMode::accuracy_constrained, TrainingMode::fine_grained})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown training mode: " + name);
}

std::string to_string(KernelSpec::Kind kind) {
  return kind == KernelSpec::Kind::linear ? "linear" : "rbf";
}

KernelSpec::Kind kernel_kind_from_string(const std::string& name) {
  if (name == "linear") return KernelSpec::Kind::linear;
  if (name == "rbf") return KernelSpec::Kind::rbf;
  throw std::invalid_argument("unknown kernel: " + name);
}

void FitSpec::validate(Index rows, Index sensitive_columns) const {
  solver.validate();
  if (!(svm_cost > 0.0) || !std::isfinite(svm_cost))
    throw std::invalid_argument("svm_cost must be positive and finite");
  if (!is_finite_nonnegative(l2_penalty))
    throw std::invalid_argument("l2_penalty must be >= 0");
  if (kernel.kind == KernelSpec::Kind::rbf && kernel.rbf_gamma < 0.0)
    throw std::invalid_argument("rbf_gamma must be positive (0 selects the default)");
  const bool wants_c = mode == TrainingMode::fairness_constrained;
  const bool wants_gamma = mode == TrainingMode::accuracy_constrained;
  const bool wants_points = mode == TrainingMode::fine_grained;
  if (wants_c != (covariance_thresholds.size() > 0))
    throw std::invalid_argument("covariance_thresholds are required exactly in "
                                "fairness_constrained mode");
  if (wants_gamma != gamma.has_value())
    throw std::invalid_argument("gamma is required exactly in accuracy_constrained mode");
  if (!wants_points && (per_point_gammas.size() > 0 || !protected_indices.empty()))
    throw std::invalid_argument("per-point settings are only valid in fine_grained mode");
  if (wants_c) {
    if (covariance_thresholds.size() != sensitive_columns)
      throw std::invalid_argument("one covariance threshold per sensitive column required");
    for (Index k = 0; k < covariance_thresholds.size(); ++k)
      if (!(covariance_thresholds[k] >= 0.0))
        throw std::invalid_argument("covariance thresholds must be >= 0");
  }
  if (wants_gamma && !is_finite_nonnegative(*gamma))
    throw std::invalid_argument("gamma must be finite and >= 0");
  if (wants_points) {
    if (per_point_gammas.size() != rows)
      throw std::invalid_argument("one per-point gamma per training row required");
    for (Index i = 0; i < rows; ++i)
      if (!(per_point_gammas[i] >= 0.0))
        throw std::invalid_argument("per-point gammas must be >= 0");
    std::vector<Index> sorted = protected_indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("duplicate protected index");
    if (!sorted.empty() && (sorted.front() < 0 || sorted.back() >= rows))
      throw std::invalid_argument("protected index out of range");
  }
}

LinearModel fit_logreg(const Dataset& train, const FitSpec& spec) {
  require_mode(spec, {TrainingMode::unconstrained}, "fit_logreg");
  spec.validate(train.rows(), train.sensitive_count());
  const LogisticSolve s = solve_logistic(train, spec, Matrix(0, train.dim()), Vector());
  LinearModel model;
  model.theta = s.result.point;
  model.meta.classifier = ClassifierKind::logreg;
  model.meta.mode = TrainingMode::unconstrained;
  model.meta.auto_ridge = s.auto_ridge;
  model.meta.l2_penalty = s.l2;
  model.meta.objective = s.result.objective_value;
  model.meta.loss = s.result.objective_value;
  fill_status(model.meta, s.result);
  return model;
}

LinearModel fit_logreg_fair(const Dataset& train, const FitSpec& spec) {
  require_mode(spec, {TrainingMode::fairness_constrained}, "fit_logreg_fair");
  spec.validate(train.rows(), train.sensitive_count());
  const Matrix a = covariance_directions(train.sensitive(), train.features());
  Matrix lhs;
  Vector rhs;
  covariance_rows(a, spec.covariance_thresholds, train.dim(), lhs, rhs);
  const LogisticSolve s = solve_logistic(train, spec, lhs, rhs);
  LinearModel model;
  model.theta = s.result.point;
  model.meta.classifier = ClassifierKind::logreg;
  model.meta.mode = spec.mode;
  model.meta.thresholds = spec.covariance_thresholds;
  model.meta.auto_ridge = s.auto_ridge;
  model.meta.l2_penalty = s.l2;
  model.meta.objective = s.result.objective_value;
  model.meta.loss = s.result.objective_value;
  fill_status(model.meta, s.result);
  return model;
}

namespace {

// Shared set-up of the two fairness-maximizing modes: variables
// v = (theta, t), objective sum_k t_k, rows +-a_k^T theta - t_k <= 0.
SmoothProblem epigraph_problem(const Matrix& directions, Index d) {
  const Index k = directions.cols();
  SmoothProblem p;
  p.dimension = d + k;
  p.objective = [d, k](const Vector& v, Vector* g) {
    if (g) {
      g->setZero(d + k);
      g->tail(k).setOnes();
    }
    return v.tail(k).sum();
  };
  p.linear_lhs.setZero(2 * k, d + k);
  p.linear_rhs.setZero(2 * k);
  for (Index j = 0; j < k; ++j) {
    p.linear_lhs.row(2 * j).head(d) = directions.col(j).transpose();
    p.linear_lhs.row(2 * j + 1).head(d) = -directions.col(j).transpose();
    p.linear_lhs(2 * j, d + j) = -1.0;
    p.linear_lhs(2 * j + 1, d + j) = -1.0;
  }
  p.initial_point = Vector::Zero(d + k);
  return p;
}

// (theta*, |cov(theta*)| + 1): strictly inside the epigraph rows.
Vector epigraph_anchor(const Matrix& directions, const Vector& theta_star) {
  const Index d = theta_star.size();
  const Index k = directions.cols();
  Vector v(d + k);
  v.head(d) = theta_star;
  v.tail(k) = (directions.transpose() * theta_star).cwiseAbs().array() + 1.0;
  return v;
}

LinearModel finish_epigraph(const Dataset& train, const Matrix& directions,
                            const SolverResult& r, const LinearModel& baseline,
                            TrainingMode mode, double l2) {
  LinearModel model;
  model.theta = r.point.head(train.dim());
  model.meta.classifier = ClassifierKind::logreg;
  model.meta.mode = mode;
  model.meta.l2_penalty = l2;
  model.meta.auto_ridge = baseline.meta.auto_ridge;
  model.meta.objective = total_abs_covariance(directions, model.theta);
  model.meta.loss = LogisticLoss(train.features(), train.labels(), l2)(model.theta, nullptr);
  model.meta.reference_loss = baseline.meta.loss;
  fill_status(model.meta, r);
  return model;
}

}  // namespace

LinearModel fit_logreg_fairness_max(const Dataset& train, const FitSpec& spec,
                                    const LinearModel* baseline) {
  require_mode(spec, {TrainingMode::accuracy_constrained}, "fit_logreg_fairness_max");
  spec.validate(train.rows(), train.sensitive_count());
  const LinearModel base = baseline_or_fit(train, spec, baseline);
  if (!base.meta.converged)
    throw std::runtime_error("unconstrained logistic fit did not converge");
  const Index d = train.dim();
  const double l2 = base.meta.l2_penalty;
  const Matrix a = covariance_directions(train.sensitive(), train.features());
  SmoothProblem p = epigraph_problem(a, d);
  const double bound = (1.0 + *spec.gamma) * base.meta.loss * (1.0 + 1e-8);
  p.convex.push_back(total_loss_block(train.features(), train.labels(), bound, p.dimension, l2));
  p.feasible_anchor = epigraph_anchor(a, base.theta);
  const SolverResult r = optim::minimize_smooth(p, spec.solver);
  LinearModel model = finish_epigraph(train, a, r, base, spec.mode, l2);
  model.meta.gamma = spec.gamma;
  return model;
}

LinearModel fit_logreg_fine_grained(const Dataset& train, const FitSpec& spec,
                                    const LinearModel* baseline) {
  require_mode(spec, {TrainingMode::fine_grained}, "fit_logreg_fine_grained");
  spec.validate(train.rows(), train.sensitive_count());
  const LinearModel base = baseline_or_fit(train, spec, baseline);
  if (!base.meta.converged)
    throw std::runtime_error("unconstrained logistic fit did not converge");
  const Matrix& x = train.features();
  const Vector& y = train.labels();
  const Index d = train.dim();
  const Index n = train.rows();
  const Matrix a = covariance_directions(train.sensitive(), x);
  SmoothProblem p = epigraph_problem(a, d);

  std::vector<bool> is_protected(static_cast<std::size_t>(n), false);
  for (const Index i : spec.protected_indices) is_protected[static_cast<std::size_t>(i)] = true;
  // Non-flip rows -x_i^T theta <= 0.
  const Index np = static_cast<Index>(spec.protected_indices.size());
  const Index base_rows = p.linear_lhs.rows();
  p.linear_lhs.conservativeResize(base_rows + np, p.dimension);
  p.linear_rhs.conservativeResize(base_rows + np);
  for (Index r = 0; r < np; ++r) {
    p.linear_lhs.row(base_rows + r).setZero();
    p.linear_lhs.row(base_rows + r).head(d) = -x.row(spec.protected_indices[r]);
    p.linear_rhs[base_rows + r] = 0.0;
  }
  // Per-point loss rows for every other row with a finite allowance.
  const Vector star_losses = LogisticLoss(x, y).per_point(base.theta);
  std::vector<Index> rows;
  std::vector<double> bounds;
  for (Index i = 0; i < n; ++i) {
    if (is_protected[static_cast<std::size_t>(i)] || !std::isfinite(spec.per_point_gammas[i]))
      continue;
    rows.push_back(i);
    bounds.push_back((1.0 + spec.per_point_gammas[i]) * star_losses[i] + kPointSlack);
  }
  if (!rows.empty()) {
    Vector b = Eigen::Map<const Vector>(bounds.data(), static_cast<Index>(bounds.size()));
    p.convex.push_back(per_point_loss_block(x, y, rows, std::move(b), p.dimension));
  }

  optim::SolverSettings settings = spec.solver;
  settings.primal_tolerance = std::min(settings.feasibility_target(), kPointSlack);
  const Vector anchor = epigraph_anchor(a, base.theta);
  const bool anchor_ok =
      (p.constraint_values(anchor).array() <= 0.0).all();
  if (anchor_ok) p.feasible_anchor = anchor;
  SolverResult r = optim::minimize_smooth(p, settings);

  // Non-flip rows are kept exact (d >= 0, no tolerance) by a final pull-back.
  if (anchor_ok && r.status != SolverStatus::infeasible) {
    const double target = settings.feasibility_target();
    auto ok = [&](const Vector& v) {
      const Vector h = p.constraint_values(v);
      if ((h.array() > target).any()) return false;
      for (Index j = 0; j < np; ++j)
        if (h[base_rows + j] > 0.0) return false;
      return true;
    };
    const Vector fixed = pull_towards(r.point, anchor, ok);
    if (fixed != r.point) {
      r.point = fixed;
      r.objective_value = p.objective(fixed, nullptr);
      r.kkt = optim::kkt_residuals(p, fixed, r.multipliers);
      const bool certified = r.kkt.primal_violation <= target &&
                             r.kkt.stationarity <= settings.kkt_tolerance &&
                             r.kkt.complementarity <= settings.kkt_tolerance;
      r.status = certified ? SolverStatus::converged : SolverStatus::max_iter;
    }
  }
  return finish_epigraph(train, a, r, base, spec.mode, base.meta.l2_penalty);
}

double svm_primal_objective(const Vector& theta, const Matrix& x, const Vector& y, double cost,
                            SvmLoss loss) {
  const Vector margins = y.cwiseProduct(x * theta);
  const auto slack = (1.0 - margins.array()).cwiseMax(0.0);
  const double data = loss == SvmLoss::hinge ? slack.sum() : slack.square().sum();
  return theta.squaredNorm() + cost * data;
}

namespace {

LinearModel squared_hinge_svm(const Dataset& train, const FitSpec& spec) {
  const Matrix& x = train.features();
  const Vector& y = train.labels();
  const Index d = train.dim();
  const double cost = spec.svm_cost;
  const Matrix a = covariance_directions(train.sensitive(), x);
  SmoothProblem p;
  p.dimension = d;
  p.objective = [&x, &y, cost](const Vector& t, Vector* g) {
    const Vector slack = (1.0 - y.cwiseProduct(x * t).array()).cwiseMax(0.0).matrix();
    if (g) *g = 2.0 * t - 2.0 * cost * x.transpose() * slack.cwiseProduct(y);
    return t.squaredNorm() + cost * slack.squaredNorm();
  };
  covariance_rows(a, spec.covariance_thresholds, d, p.linear_lhs, p.linear_rhs);
  p.initial_point = Vector::Zero(d);
  if (p.linear_rhs.size() > 0 && (p.linear_rhs.array() > 0.0).all())
    p.feasible_anchor = Vector::Zero(d);
  const SolverResult r = optim::minimize_smooth(p, spec.solver);
  LinearModel model;
  model.theta = r.point;
  model.meta.objective = r.objective_value;
  fill_status(model.meta, r);
  return model;
}

}  // namespace

LinearModel fit_linear_svm_fair(const Dataset& train, const FitSpec& spec) {
  require_mode(spec, {TrainingMode::unconstrained, TrainingMode::fairness_constrained},
               "fit_linear_svm_fair");
  spec.validate(train.rows(), train.sensitive_count());
  if (spec.svm_loss == SvmLoss::squared_hinge) {
    LinearModel model = squared_hinge_svm(train, spec);
    model.meta.classifier = ClassifierKind::linear_svm;
    model.meta.mode = spec.mode;
    model.meta.thresholds = spec.covariance_thresholds;
    model.meta.svm_cost = spec.svm_cost;
    model.meta.loss = model.meta.objective;
    return model;
  }
  const Matrix& x = train.features();
  const Vector& y = train.labels();
  const Index n = train.rows();
  const Index d = train.dim();
  const Matrix a = covariance_directions(train.sensitive(), x);
  std::vector<Index> active;
  for (Index k = 0; k < spec.covariance_thresholds.size(); ++k)
    if (std::isfinite(spec.covariance_thresholds[k])) active.push_back(k);
  const Index m = static_cast<Index>(active.size());

  // Dual variables u = (alpha, lambda+_k, lambda-_k); theta = F u / 2 with
  // F = [y_i x_i | -a_k | +a_k]. The dual is
  //   min 1/4 ||F u||^2 - sum alpha + sum_k c_k (lambda+_k + lambda-_k).
  Matrix f(d, n + 2 * m);
  f.leftCols(n) = (y.asDiagonal() * x).transpose();
  Matrix dirs(d, m);
  for (Index r = 0; r < m; ++r) {
    dirs.col(r) = a.col(active[static_cast<std::size_t>(r)]);
    f.col(n + 2 * r) = -dirs.col(r);
    f.col(n + 2 * r + 1) = dirs.col(r);
  }
  optim::QuadraticProblem qp;
  qp.linear = Vector::Zero(n + 2 * m);
  qp.linear.head(n).setConstant(-1.0);
  qp.lower = Vector::Zero(n + 2 * m);
  qp.upper = Vector::Constant(n + 2 * m, std::numeric_limits<double>::infinity());
  qp.upper.head(n).setConstant(spec.svm_cost);
  for (Index r = 0; r < m; ++r) {
    const double c = spec.covariance_thresholds[active[static_cast<std::size_t>(r)]];
    qp.linear[n + 2 * r] = c;
    qp.linear[n + 2 * r + 1] = c;
  }
  qp.hessian = optim::QuadraticForm::factored(f / std::sqrt(2.0));
  const SolverResult r = hinge_dual(qp, f.leftCols(n), dirs, spec.solver);

  LinearModel model;
  model.theta = 0.5 * f * r.point;
  model.meta.classifier = ClassifierKind::linear_svm;
  model.meta.mode = spec.mode;
  model.meta.thresholds = spec.covariance_thresholds;
  model.meta.svm_cost = spec.svm_cost;
  model.meta.objective = svm_primal_objective(model.theta, x, y, spec.svm_cost);
  model.meta.loss = model.meta.objective;
  fill_status(model.meta, r);
  return model;
}

KernelModel fit_kernel_svm_fair(const Dataset& train, const FitSpec& spec) {
  require_mode(spec, {TrainingMode::unconstrained, TrainingMode::fairness_constrained},
               "fit_kernel_svm_fair");
  spec.validate(train.rows(), train.sensitive_count());
  const Matrix& x = train.features();
  const Vector& y = train.labels();
  const Index n = train.rows();
  KernelSpec kernel = spec.kernel;
  if (kernel.kind == KernelSpec::Kind::rbf && kernel.rbf_gamma == 0.0)
    kernel.rbf_gamma = default_rbf_gamma(x);

  Matrix q = gram_matrix(kernel, x, x);
  // Covariance of z_k with g_alpha on the training rows is r_k^T alpha with
  // r_k = y o (K (z_k - mean z_k)) / N.
  std::vector<Index> active;
  for (Index k = 0; k < spec.covariance_thresholds.size(); ++k)
    if (std::isfinite(spec.covariance_thresholds[k])) active.push_back(k);
  const Index m = static_cast<Index>(active.size());
  optim::QuadraticProblem qp;
  qp.inequality_lhs.resize(2 * m, n);
  qp.inequality_rhs.resize(2 * m);
  for (Index r = 0; r < m; ++r) {
    const Index k = active[static_cast<std::size_t>(r)];
    const Vector zc = train.sensitive().col(k).array() - train.sensitive().col(k).mean();
    const Vector row = y.cwiseProduct(q * zc) / static_cast<double>(n);
    qp.inequality_lhs.row(2 * r) = row.transpose();
    qp.inequality_lhs.row(2 * r + 1) = -row.transpose();
    qp.inequality_rhs[2 * r] = spec.covariance_thresholds[k];
    qp.inequality_rhs[2 * r + 1] = spec.covariance_thresholds[k];
  }
  // Q = Y (K + I / C) Y, built in place.
  q = y.asDiagonal() * q * y.asDiagonal();
  q.diagonal().array() += 1.0 / spec.svm_cost;
  qp.hessian = optim::QuadraticForm::dense(std::move(q));
  qp.linear = -Vector::Ones(n);
  qp.lower = Vector::Zero(n);
  qp.upper = Vector::Constant(n, spec.svm_cost);
  qp.equality = optim::LinearEquality{y, 0.0};
  const SolverResult r = optim::solve_qp(qp, spec.solver);

  KernelModel model;
  std::vector<Index> support;
  for (Index i = 0; i < n; ++i)
    if (r.point[i] > 0.0) support.push_back(i);
  const Index ns = static_cast<Index>(support.size());
  model.alphas.resize(ns);
  model.support_points.resize(ns, x.cols());
  model.support_labels.resize(ns);
  for (Index s = 0; s < ns; ++s) {
    const Index i = support[static_cast<std::size_t>(s)];
    model.alphas[s] = r.point[i];
    model.support_points.row(s) = x.row(i);
    model.support_labels[s] = y[i];
  }
  model.kernel = kernel;
  model.svm_cost = spec.svm_cost;
  // The equality multiplier is the unregularized offset of the primal.
  model.intercept = r.multipliers.size() > 0 ? r.multipliers[0] : 0.0;
  model.meta.classifier = ClassifierKind::kernel_svm;
  model.meta.mode = spec.mode;
  model.meta.thresholds = spec.covariance_thresholds;
  model.meta.svm_cost = spec.svm_cost;
  // Dual objective sum alpha - 1/2 alpha^T Q alpha (to be maximized).
  model.meta.objective = -r.objective_value;
  model.meta.loss = model.meta.objective;
  fill_status(model.meta, r);
  return model;
}

Model fit(ClassifierKind kind, const Dataset& train, const FitSpec& spec,
          const LinearModel* baseline) {
  switch (kind) {
    case ClassifierKind::logreg:
      switch (spec.mode) {
        case TrainingMode::unconstrained: return fit_logreg(train, spec);
        case TrainingMode::fairness_constrained: return fit_logreg_fair(train, spec);
        case TrainingMode::accuracy_constrained:
          return fit_logreg_fairness_max(train, spec, baseline);
        case TrainingMode::fine_grained: return fit_logreg_fine_grained(train, spec, baseline);
      }
      break;
    case ClassifierKind::linear_svm: return fit_linear_svm_fair(train, spec);
    case ClassifierKind::kernel_svm: return fit_kernel_svm_fair(train, spec);
  }
  throw std::invalid_argument("unsupported classifier/mode combination");
}

Vector decision_values(const LinearModel& model, const Matrix& x) {
  if (x.cols() != model.theta.size())
    throw std::invalid_argument("feature width does not match the model");
  return x * model.theta;
}

Vector decision_values(const KernelModel& model, const Matrix& x) {
  if (x.cols() != model.support_points.cols())
    throw std::invalid_argument("feature width does not match the model");
  if (model.alphas.size() == 0) return Vector::Constant(x.rows(), model.intercept);
  const Matrix k = gram_matrix(model.kernel, x, model.support_points);
  return k * model.alphas.cwiseProduct(model.support_labels) +
         Vector::Constant(x.rows(), model.intercept);
}

Vector decision_values(const Model& model, const Matrix& x) {
  return std::visit([&](const auto& m) { return decision_values(m, x); }, model);
}

Vector predict(const Vector& distances) {
  return distances.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
}

const TrainingMeta& meta(const Model& model) {
  return std::visit([](const auto& m) -> const TrainingMeta& { return m.meta; }, model);
}

}  // namespace fairbound
