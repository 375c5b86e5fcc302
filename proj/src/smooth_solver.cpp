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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fairbound/optim.hpp"

namespace fairbound::optim {

void SolverSettings::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  if (!(objective_tolerance > 0.0) || !(kkt_tolerance > 0.0))
    throw std::invalid_argument("tolerances must be positive");
}

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::max_iter: return "max_iter";
    case SolverStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

Index SmoothProblem::constraint_count() const {
  Index m = linear_lhs.rows();
  for (const auto& block : convex) m += block.size;
  return m;
}

Vector SmoothProblem::constraint_values(const Vector& x, Matrix* jacobian) const {
  const Index m = constraint_count();
  Vector h(m);
  if (jacobian) jacobian->resize(m, dimension);
  Index row = linear_lhs.rows();
  if (row > 0) {
    h.head(row) = linear_lhs * x - linear_rhs;
    if (jacobian) jacobian->topRows(row) = linear_lhs;
  }
  Vector values;
  Matrix jac;
  for (const auto& block : convex) {
    block.evaluate(x, values, jacobian ? &jac : nullptr);
    if (values.size() != block.size)
      throw std::logic_error("convex constraint block returned wrong size");
    h.segment(row, block.size) = values;
    if (jacobian) jacobian->middleRows(row, block.size) = jac;
    row += block.size;
  }
  return h;
}

namespace {

struct Evaluation {
  double f = 0.0;
  Vector g;
};

// Strong-Wolfe line search (bracketing + safeguarded cubic zoom). The
// sufficient-decrease test falls back to the approximate Wolfe condition of
// Hager and Zhang once function differences sink below rounding noise.
class LineSearch {
 public:
  LineSearch(const SmoothFunction& fun, const Vector& x, const Vector& p,
             const Evaluation& start)
      : fun_(fun), x_(x), p_(p), f0_(start.f), d0_(start.g.dot(p)),
        noise_(1e-12 * (1.0 + std::abs(start.f))) {}

  bool run(double alpha, double& accepted, Evaluation& out) {
    double a_prev = 0.0, f_prev = f0_, d_prev = d0_;
    for (int i = 0; i < 40; ++i) {
      Evaluation e;
      double d = 0.0;
      if (!evaluate(alpha, e, d)) {
        alpha = 0.5 * (a_prev + alpha);
        continue;
      }
      if (!sufficient(alpha, e.f, d) || (i > 0 && e.f >= f_prev))
        return zoom(a_prev, f_prev, d_prev, alpha, e.f, d, accepted, out);
      if (std::abs(d) <= -kC2 * d0_) {
        accepted = alpha;
        out = std::move(e);
        return true;
      }
      if (d >= 0.0) return zoom(alpha, e.f, d, a_prev, f_prev, d_prev, accepted, out);
      a_prev = alpha;
      f_prev = e.f;
      d_prev = d;
      remember(alpha, e);
      alpha = std::min(2.0 * alpha, 1e10);
    }
    return fallback(accepted, out);
  }

 private:
  static constexpr double kC1 = 1e-4;
  static constexpr double kC2 = 0.9;

  bool evaluate(double alpha, Evaluation& e, double& d) {
    e.g.resize(x_.size());
    e.f = fun_(x_ + alpha * p_, &e.g);
    if (!std::isfinite(e.f) || !e.g.allFinite()) return false;
    d = e.g.dot(p_);
    return true;
  }

  bool sufficient(double alpha, double f, double d) const {
    if (f <= f0_ + kC1 * alpha * d0_) return true;
    return f <= f0_ + noise_ && d <= (2.0 * kC1 - 1.0) * d0_;
  }

  void remember(double alpha, const Evaluation& e) {
    if (e.f < best_f_) {
      best_f_ = e.f;
      best_alpha_ = alpha;
      best_ = e;
    }
  }

  bool fallback(double& accepted, Evaluation& out) {
    if (best_alpha_ > 0.0 && best_f_ < f0_) {
      accepted = best_alpha_;
      out = best_;
      return true;
    }
    return false;
  }

  bool zoom(double lo, double f_lo, double d_lo, double hi, double f_hi,
            double d_hi, double& accepted, Evaluation& out) {
    for (int i = 0; i < 50; ++i) {
      const double width = hi - lo;
      double alpha = cubic_minimizer(lo, f_lo, d_lo, hi, f_hi, d_hi);
      const double a = std::min(lo, hi), b = std::max(lo, hi);
      const double margin = 0.1 * (b - a);
      if (!std::isfinite(alpha) || alpha < a + margin || alpha > b - margin)
        alpha = 0.5 * (lo + hi);
      Evaluation e;
      double d = 0.0;
      if (!evaluate(alpha, e, d)) {
        hi = alpha;
        f_hi = std::numeric_limits<double>::infinity();
        d_hi = 0.0;
        continue;
      }
      remember(alpha, e);
      if (!sufficient(alpha, e.f, d) || e.f >= f_lo) {
        hi = alpha;
        f_hi = e.f;
        d_hi = d;
      } else {
        if (std::abs(d) <= -kC2 * d0_) {
          accepted = alpha;
          out = std::move(e);
          return true;
        }
        if (d * width >= 0.0) {
          hi = lo;
          f_hi = f_lo;
          d_hi = d_lo;
        }
        lo = alpha;
        f_lo = e.f;
        d_lo = d;
      }
      if (std::abs(hi - lo) <= 1e-16 * std::max(1.0, std::abs(lo))) break;
    }
    return fallback(accepted, out);
  }

  static double cubic_minimizer(double a, double fa, double da, double b,
                                double fb, double db) {
    if (!std::isfinite(fb)) return 0.5 * (a + b);
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - da * db;
    if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    return b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
  }

  const SmoothFunction& fun_;
  const Vector& x_;
  const Vector& p_;
  double f0_;
  double d0_;
  double noise_;
  double best_f_ = std::numeric_limits<double>::infinity();
  double best_alpha_ = 0.0;
  Evaluation best_;
};

struct InnerResult {
  Vector x;
  Evaluation at;
  int iterations = 0;
  bool converged = false;
};

InnerResult bfgs(const SmoothFunction& fun, Vector x, double gtol, int max_iter) {
  const Index n = x.size();
  InnerResult r;
  r.at.g.resize(n);
  r.at.f = fun(x, &r.at.g);
  if (!std::isfinite(r.at.f)) throw std::runtime_error("objective is not finite at the start point");
  Matrix h = Matrix::Identity(n, n);
  bool scaled = false;
  for (; r.iterations < max_iter; ++r.iterations) {
    if (r.at.g.norm() <= gtol) {
      r.converged = true;
      break;
    }
    Vector p = -h * r.at.g;
    if (!(r.at.g.dot(p) < 0.0)) {
      h.setIdentity();
      scaled = false;
      p = -r.at.g;
    }
    const double alpha0 = scaled ? 1.0 : std::min(1.0, 1.0 / r.at.g.norm());
    double alpha = 0.0;
    Evaluation next;
    LineSearch search(fun, x, p, r.at);
    if (!search.run(alpha0, alpha, next)) {
      if (!scaled && h.isIdentity()) break;  // steepest descent failed too
      h.setIdentity();
      scaled = false;
      continue;
    }
    const Vector s = alpha * p;
    const Vector y = next.g - r.at.g;
    x += s;
    r.at = std::move(next);
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      if (!scaled) {
        h *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Vector hy = h * y;
      // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      h += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) -
           rho * (hy * s.transpose() + s * hy.transpose());
    }
  }
  if (!r.converged && r.at.g.norm() <= gtol) r.converged = true;
  r.x = std::move(x);
  return r;
}

double max_violation(const Vector& h) {
  return h.size() == 0 ? 0.0 : std::max(0.0, h.maxCoeff());
}

}  // namespace

KktResiduals kkt_residuals(const SmoothProblem& problem, const Vector& point,
                           const Vector& multipliers) {
  if (point.size() != problem.dimension)
    throw std::invalid_argument("point dimension mismatch");
  const Index m = problem.constraint_count();
  if (multipliers.size() != m) throw std::invalid_argument("multiplier count mismatch");
  if (m > 0 && multipliers.minCoeff() < 0.0)
    throw std::invalid_argument("multipliers must be non-negative");
  Vector grad(problem.dimension);
  problem.objective(point, &grad);
  KktResiduals k;
  if (m > 0) {
    Matrix jac;
    const Vector h = problem.constraint_values(point, &jac);
    grad += jac.transpose() * multipliers;
    k.primal_violation = max_violation(h);
    k.complementarity = (multipliers.array() * h.array()).abs().maxCoeff();
  }
  k.stationarity = grad.norm();
  return k;
}

SolverResult minimize_smooth(const SmoothProblem& problem,
                             const SolverSettings& settings) {
  settings.validate();
  const Index n = problem.dimension;
  if (!problem.objective) throw std::invalid_argument("problem has no objective");
  if (problem.linear_lhs.rows() != problem.linear_rhs.size() ||
      (problem.linear_lhs.rows() > 0 && problem.linear_lhs.cols() != n))
    throw std::invalid_argument("linear constraint dimensions are inconsistent");
  Vector x = problem.initial_point.size() == n ? problem.initial_point : Vector::Zero(n);
  const Index m = problem.constraint_count();
  const double feas_target = settings.feasibility_target();
  const double gtol = 0.1 * settings.kkt_tolerance;

  SolverResult result;
  Vector lambda = Vector::Zero(m);
  int budget = settings.max_iterations;

  if (m == 0) {
    InnerResult inner = bfgs(problem.objective, x, gtol, budget);
    result.point = std::move(inner.x);
    result.objective_value = inner.at.f;
    result.iterations = inner.iterations;
    result.multipliers = lambda;
    result.kkt.stationarity = inner.at.g.norm();
    result.status = inner.converged ? SolverStatus::converged : SolverStatus::max_iter;
    return result;
  }

  double rho = 0.0;
  {
    Vector g0(n);
    const double f0 = problem.objective(x, &g0);
    const Vector h0 = problem.constraint_values(x);
    const double pos = h0.cwiseMax(0.0).squaredNorm();
    rho = std::clamp(10.0 * std::max(1.0, std::abs(f0)) / std::max(1.0, 0.5 * pos), 1e-8, 1e8);
  }

  auto merit = [&](const Vector& v, Vector* grad) {
    Matrix jac;
    const double f = problem.objective(v, grad);
    const Vector h = problem.constraint_values(v, grad ? &jac : nullptr);
    const Vector shifted = (lambda + rho * h).cwiseMax(0.0);
    const double penalty =
        (shifted.squaredNorm() - lambda.squaredNorm()) / (2.0 * rho);
    if (grad) *grad += jac.transpose() * shifted;
    return f + penalty;
  };

  double prev_violation = std::numeric_limits<double>::infinity();
  double prev_objective = std::numeric_limits<double>::quiet_NaN();
  int stalled = 0;
  result.status = SolverStatus::max_iter;
  for (int outer = 0; outer < 200 && budget > 0; ++outer) {
    InnerResult inner = bfgs(merit, x, gtol, budget);
    budget -= std::max(1, inner.iterations);
    result.iterations += inner.iterations;
    x = std::move(inner.x);
    const Vector h = problem.constraint_values(x);
    lambda = (lambda + rho * h).cwiseMax(0.0);
    const double violation = max_violation(h);
    const double compl_slack = (lambda.array() * h.array()).abs().maxCoeff();
    const double objective = problem.objective(x, nullptr);
    if (settings.verbosity > 0)
      std::fprintf(stderr, "al outer %d rho=%.3g f=%.12g viol=%.3g compl=%.3g grad=%.3g\n",
                   outer, rho, objective, violation, compl_slack, inner.at.g.norm());
    if (violation <= feas_target && compl_slack <= settings.kkt_tolerance &&
        inner.at.g.norm() <= settings.kkt_tolerance) {
      result.status = SolverStatus::converged;
      break;
    }
    if (violation <= feas_target && std::isfinite(prev_objective) &&
        std::abs(objective - prev_objective) <=
            settings.objective_tolerance * 1e-6 * std::max(1.0, std::abs(objective))) {
      if (++stalled >= 5) break;
    } else {
      stalled = 0;
    }
    prev_objective = objective;
    if (violation > feas_target && violation > 0.25 * prev_violation) rho *= 10.0;
    if (rho > 1e12 && violation > feas_target) {
      result.status = SolverStatus::infeasible;
      break;
    }
    prev_violation = violation;
  }

  // Pull back towards the anchor if the multiplier method left a violation.
  if (problem.feasible_anchor && result.status != SolverStatus::infeasible) {
    const Vector& anchor = *problem.feasible_anchor;
    if (anchor.size() != n) throw std::invalid_argument("feasible_anchor dimension mismatch");
    if (max_violation(problem.constraint_values(x)) > feas_target &&
        max_violation(problem.constraint_values(anchor)) <= feas_target) {
      double lo = 0.0, hi = 1.0;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        const Vector trial = anchor + mid * (x - anchor);
        (max_violation(problem.constraint_values(trial)) <= feas_target ? lo : hi) = mid;
      }
      x = anchor + lo * (x - anchor);
    }
  }

  result.point = x;
  result.multipliers = lambda;
  result.objective_value = problem.objective(x, nullptr);
  result.kkt = kkt_residuals(problem, x, lambda);
  if (result.status != SolverStatus::infeasible) {
    const bool ok = result.kkt.primal_violation <= feas_target &&
                    result.kkt.stationarity <= settings.kkt_tolerance &&
                    result.kkt.complementarity <= settings.kkt_tolerance;
    if (ok) {
      result.status = SolverStatus::converged;
    } else if (result.status == SolverStatus::converged) {
      result.status = SolverStatus::max_iter;
    }
  }
  return result;
}

}  // namespace fairbound::optim
