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
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "fairbound/optim.hpp"

namespace fairbound::optim {

QuadraticForm QuadraticForm::dense(Matrix q) { return QuadraticForm(std::move(q), false); }
QuadraticForm QuadraticForm::factored(Matrix f) { return QuadraticForm(std::move(f), true); }

Vector QuadraticForm::apply(const Vector& x) const {
  if (factored_) return data_.transpose() * (data_ * x);
  return data_ * x;
}

double QuadraticForm::diagonal(Index i) const {
  return factored_ ? data_.col(i).squaredNorm() : data_(i, i);
}

double QuadraticProblem::objective(const Vector& x) const {
  return 0.5 * x.dot(hessian.apply(x)) + linear.dot(x);
}

void QuadraticProblem::validate() const {
  const Index n = size();
  if (hessian.size() != n) throw std::invalid_argument("Hessian size does not match linear term");
  if (!hessian.is_factored() && hessian.matrix().cols() != n)
    throw std::invalid_argument("dense Hessian must be square");
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("bound vectors must match the variable count");
  if (initial_point.size() != 0 && initial_point.size() != n)
    throw std::invalid_argument("initial point must be empty or match the variable count");
  if ((lower.array() > upper.array()).any()) throw std::invalid_argument("lower bound above upper bound");
  if (equality && equality->coefficients.size() != n)
    throw std::invalid_argument("equality coefficients have the wrong length");
  if (inequality_lhs.rows() != inequality_rhs.size() ||
      (inequality_lhs.rows() > 0 && inequality_lhs.cols() != n))
    throw std::invalid_argument("inequality dimensions are inconsistent");
  if (!hessian.is_factored()) {
    const Matrix& q = hessian.matrix();
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw std::invalid_argument("QP Hessian is not symmetric");
    const double shift = 1e-9 * std::max(1.0, q.diagonal().cwiseAbs().maxCoeff());
    Matrix shifted = q;
    shifted.diagonal().array() += shift;
    Eigen::LLT<Eigen::Ref<Matrix>> llt(shifted);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("QP Hessian is not positive semidefinite");
  }
}

namespace {

constexpr int kPolishEvery = 10;

double natural_residual(double x, double g, double lo, double hi) {
  return std::abs(x - std::clamp(x - g, lo, hi));
}

// Coordinate-descent state for the augmented-Lagrangian subproblem. Rows of
// `rows_` are the constraint rows rescaled to RMS entry 1; row 0 is the
// equality when present.
class CoordinateDescent {
 public:
  CoordinateDescent(const QuadraticProblem& p, const Matrix& rows, const Vector& rhs,
                    bool has_equality)
      : p_(p), rows_(rows), rhs_(rhs), has_eq_(has_equality), n_(p.size()),
        m_(rows.rows()) {
    x_ = (p.initial_point.size() == n_ ? p.initial_point : Vector::Zero(n_))
             .cwiseMax(p.lower)
             .cwiseMin(p.upper);
    diag_.resize(n_);
    for (Index i = 0; i < n_; ++i) diag_[i] = p.hessian.diagonal(i);
    if (p.hessian.is_factored()) {
      w_ = p.hessian.matrix() * x_;
    } else {
      grad_ = p.hessian.matrix() * x_ + p.linear;
    }
    r_ = rows_ * x_ - rhs_;
    order_.resize(static_cast<std::size_t>(n_));
    std::iota(order_.begin(), order_.end(), Index{0});
  }

  const Vector& x() const { return x_; }
  const Vector& residuals() const { return r_; }

  double gradient(Index i) const {
    if (p_.hessian.is_factored()) return p_.hessian.matrix().col(i).dot(w_) + p_.linear[i];
    return grad_[i];
  }

  Vector full_gradient() const {
    if (p_.hessian.is_factored()) return p_.hessian.matrix().transpose() * w_ + p_.linear;
    return grad_;
  }

  // Effective multipliers of the current subproblem.
  Vector effective(const Vector& mult, double rho) const {
    Vector e = mult + rho * r_;
    for (Index j = has_eq_ ? 1 : 0; j < m_; ++j) e[j] = std::max(0.0, e[j]);
    return e;
  }

  double subproblem_residual(const Vector& mult, double rho) const {
    const Vector g = full_gradient() + rows_.transpose() * effective(mult, rho);
    double worst = 0.0;
    for (Index i = 0; i < n_; ++i)
      worst = std::max(worst, natural_residual(x_[i], g[i], p_.lower[i], p_.upper[i]));
    return worst;
  }

  void sweep(const Vector& mult, double rho, std::mt19937_64& rng) {
    for (std::size_t i = order_.size(); i > 1; --i) std::swap(order_[i - 1], order_[rng() % i]);
    for (Index i : order_) update(i, mult, rho);
  }

  // Box-only problems with a factored Hessian Q = F^T F: Newton step on the
  // free coordinates, worked out in the (small) row space of F. Moves to the
  // least-squares solution of F_S^T w + q_S = 0 with the minimum-norm change
  // of x_S, then backtracks on the projected step. Returns true on descent.
  bool polish() {
    if (!p_.hessian.is_factored() || m_ > 0) return false;
    const Matrix& f = p_.hessian.matrix();
    std::vector<Index> free;
    for (Index i = 0; i < n_; ++i)
      if (x_[i] > p_.lower[i] && x_[i] < p_.upper[i]) free.push_back(i);
    if (free.empty()) return false;
    const Index k = f.rows();
    const Index s = static_cast<Index>(free.size());
    Matrix fs(k, s);
    Vector qs(s), xs(s);
    for (Index j = 0; j < s; ++j) {
      fs.col(j) = f.col(free[static_cast<std::size_t>(j)]);
      qs[j] = p_.linear[free[static_cast<std::size_t>(j)]];
      xs[j] = x_[free[static_cast<std::size_t>(j)]];
    }
    const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(fs.transpose());
    const Vector target = cod.solve(-qs);
    const Matrix gram = fs * fs.transpose();
    const Eigen::CompleteOrthogonalDecomposition<Matrix> gcod(gram);
    const Vector dx = fs.transpose() * gcod.solve(target - w_);
    const double base = objective();
    for (double t = 1.0; t > 1e-6; t *= 0.5) {
      Vector trial = x_;
      for (Index j = 0; j < s; ++j) {
        const Index i = free[static_cast<std::size_t>(j)];
        trial[i] = std::clamp(xs[j] + t * dx[j], p_.lower[i], p_.upper[i]);
      }
      const Vector w = f * trial;
      if (0.5 * w.squaredNorm() + p_.linear.dot(trial) < base) {
        x_ = trial;
        w_ = w;
        return true;
      }
    }
    return false;
  }

  double objective() const { return 0.5 * w_.squaredNorm() + p_.linear.dot(x_); }

  // Shift x along the equality row until it holds exactly (within rounding),
  // using only coordinates that have room inside the box.
  void repair_equality(const Vector& rhs_unscaled, const Vector& row_unscaled) {
    for (int pass = 0; pass < 20; ++pass) {
      const double res = row_unscaled.dot(x_) - rhs_unscaled[0];
      if (std::abs(res) <= 1e-14 * std::max(1.0, row_unscaled.cwiseAbs().dot(x_.cwiseAbs()))) break;
      double denom = 0.0;
      for (Index i = 0; i < n_; ++i) {
        const double dir = -res * row_unscaled[i];
        if ((dir > 0 && x_[i] < p_.upper[i]) || (dir < 0 && x_[i] > p_.lower[i]))
          denom += row_unscaled[i] * row_unscaled[i];
      }
      if (denom == 0.0) break;
      const double t = -res / denom;
      for (Index i = 0; i < n_; ++i) {
        const double dir = t * row_unscaled[i];
        if ((dir > 0 && x_[i] < p_.upper[i]) || (dir < 0 && x_[i] > p_.lower[i])) {
          const double next = std::clamp(x_[i] + dir, p_.lower[i], p_.upper[i]);
          move(i, next - x_[i]);
        }
      }
    }
  }

 private:
  // d/d delta of the subproblem along coordinate i at step delta.
  double derivative(Index i, double g, const Vector& mult, double rho, double delta) const {
    double d = g + diag_[i] * delta;
    for (Index j = 0; j < m_; ++j) {
      const double c = rows_(j, i);
      if (c == 0.0) continue;
      const double v = mult[j] + rho * (r_[j] + c * delta);
      d += c * ((has_eq_ && j == 0) ? v : std::max(0.0, v));
    }
    return d;
  }

  double slope(Index i, const Vector& mult, double rho, double delta) const {
    double s = diag_[i];
    for (Index j = 0; j < m_; ++j) {
      const double c = rows_(j, i);
      if (c == 0.0) continue;
      const bool active = (has_eq_ && j == 0) || mult[j] + rho * (r_[j] + c * delta) > 0.0;
      if (active) s += rho * c * c;
    }
    return s;
  }

  void update(Index i, const Vector& mult, double rho) {
    const double g = gradient(i);
    const double lo = p_.lower[i] - x_[i];
    const double hi = p_.upper[i] - x_[i];
    // Breakpoints of the piecewise-linear, non-decreasing derivative.
    points_.clear();
    for (Index j = has_eq_ ? 1 : 0; j < m_; ++j) {
      const double c = rows_(j, i);
      if (c == 0.0) continue;
      const double b = -(mult[j] + rho * r_[j]) / (rho * c);
      if (b > lo && b < hi) points_.push_back(b);
    }
    std::sort(points_.begin(), points_.end());
    if (std::isfinite(lo)) points_.insert(points_.begin(), lo);
    if (std::isfinite(hi)) points_.push_back(hi);

    double delta;
    if (std::isfinite(lo) && derivative(i, g, mult, rho, lo) >= 0.0) {
      delta = lo;
    } else if (std::isfinite(hi) && derivative(i, g, mult, rho, hi) <= 0.0) {
      delta = hi;
    } else {
      delta = solve_segment(i, g, mult, rho, lo, hi);
    }
    if (delta != 0.0) move(i, delta);
  }

  double solve_segment(Index i, double g, const Vector& mult, double rho, double lo,
                       double hi) const {
    // Find the first point with derivative >= 0 and interpolate linearly on
    // the segment ending there.
    double prev = lo;
    double d_prev = std::isfinite(lo) ? derivative(i, g, mult, rho, lo) : 0.0;
    for (double pt : points_) {
      if (pt == lo) continue;
      const double d_pt = derivative(i, g, mult, rho, pt);
      if (d_pt >= 0.0) {
        if (std::isfinite(prev)) {
          if (d_pt == d_prev) return pt;
          return prev - d_prev * (pt - prev) / (d_pt - d_prev);
        }
        const double s = slope(i, mult, rho, pt - 1.0);
        if (s <= 0.0) return pt;
        return pt - d_pt / s;
      }
      prev = pt;
      d_prev = d_pt;
    }
    // Root lies right of the last point.
    const double base = std::isfinite(prev) ? prev : 0.0;
    const double d_base = derivative(i, g, mult, rho, base);
    const double s = slope(i, mult, rho, base + 1.0);
    if (s <= 0.0) throw std::runtime_error("QP is unbounded below");
    double step = base - d_base / s;
    if (step < base && !std::isfinite(prev)) {
      // No breakpoint to the left: the region left of base might hold the
      // root (lo = -inf case).
      const double s_left = slope(i, mult, rho, base - 1.0);
      if (s_left <= 0.0) throw std::runtime_error("QP is unbounded below");
      step = base - d_base / s_left;
    }
    return std::clamp(step, lo, hi);
  }

  void move(Index i, double delta) {
    x_[i] += delta;
    if (p_.hessian.is_factored()) {
      w_ += delta * p_.hessian.matrix().col(i);
    } else {
      grad_ += delta * p_.hessian.matrix().col(i);
    }
    if (m_ > 0) r_ += delta * rows_.col(i);
  }

  const QuadraticProblem& p_;
  const Matrix& rows_;
  const Vector& rhs_;
  bool has_eq_;
  Index n_;
  Index m_;
  Vector x_;
  Vector diag_;
  Vector grad_;  // dense: Q x + q
  Vector w_;     // factored: F x
  Vector r_;     // scaled constraint residuals
  std::vector<Index> order_;
  mutable std::vector<double> points_;
};

}  // namespace

KktResiduals kkt_residuals(const QuadraticProblem& problem, const Vector& point,
                           const Vector& multipliers) {
  const Index n = problem.size();
  if (point.size() != n) throw std::invalid_argument("point dimension mismatch");
  const Index m_eq = problem.equality ? 1 : 0;
  const Index m_in = problem.inequality_lhs.rows();
  if (multipliers.size() != m_eq + m_in) throw std::invalid_argument("multiplier count mismatch");
  if (m_in > 0 && multipliers.tail(m_in).minCoeff() < 0.0)
    throw std::invalid_argument("inequality multipliers must be non-negative");
  Vector g = problem.hessian.apply(point) + problem.linear;
  KktResiduals k;
  if (m_eq) {
    g += multipliers[0] * problem.equality->coefficients;
    k.primal_violation = std::abs(problem.equality->coefficients.dot(point) - problem.equality->rhs);
  }
  if (m_in > 0) {
    const Vector r = problem.inequality_lhs * point - problem.inequality_rhs;
    g += problem.inequality_lhs.transpose() * multipliers.tail(m_in);
    k.primal_violation = std::max(k.primal_violation, std::max(0.0, r.maxCoeff()));
    k.complementarity = (multipliers.tail(m_in).array() * r.array()).abs().maxCoeff();
  }
  for (Index i = 0; i < n; ++i) {
    k.primal_violation = std::max({k.primal_violation, problem.lower[i] - point[i],
                                   point[i] - problem.upper[i]});
    k.stationarity = std::max(
        k.stationarity, natural_residual(point[i], g[i], problem.lower[i], problem.upper[i]));
  }
  return k;
}

SolverResult solve_qp(const QuadraticProblem& problem, const SolverSettings& settings) {
  settings.validate();
  problem.validate();
  const Index n = problem.size();
  const bool has_eq = problem.equality.has_value();
  const Index m_in = problem.inequality_lhs.rows();
  const Index m = (has_eq ? 1 : 0) + m_in;

  Matrix rows(m, n);
  Vector rhs(m);
  if (has_eq) {
    rows.row(0) = problem.equality->coefficients.transpose();
    rhs[0] = problem.equality->rhs;
  }
  if (m_in > 0) {
    rows.bottomRows(m_in) = problem.inequality_lhs;
    rhs.tail(m_in) = problem.inequality_rhs;
  }
  Vector scale = Vector::Ones(m);
  SolverResult result;
  for (Index j = 0; j < m; ++j) {
    const double norm = rows.row(j).norm();
    if (norm == 0.0) {
      const bool bad = (has_eq && j == 0) ? rhs[j] != 0.0 : rhs[j] < 0.0;
      if (bad) {
        result.status = SolverStatus::infeasible;
        result.point = Vector::Zero(n).cwiseMax(problem.lower).cwiseMin(problem.upper);
        result.multipliers = Vector::Zero(m);
        result.objective_value = problem.objective(result.point);
        return result;
      }
      continue;
    }
    scale[j] = std::sqrt(static_cast<double>(n)) / norm;
    rows.row(j) *= scale[j];
    rhs[j] *= scale[j];
  }

  CoordinateDescent cd(problem, rows, rhs, has_eq);
  std::mt19937_64 rng(0x6a09e667f3bcc909ULL);
  Vector mult = Vector::Zero(m);
  double mean_diag = 0.0;
  for (Index i = 0; i < n; ++i) mean_diag += problem.hessian.diagonal(i);
  mean_diag /= std::max<Index>(1, n);
  double rho = std::max(1e-6, mean_diag);
  const double feas_target = settings.feasibility_target();
  const double inner_tol = 0.1 * settings.kkt_tolerance;

  auto unscaled_violation = [&](const Vector& r) {
    double v = 0.0;
    for (Index j = 0; j < m; ++j) {
      const double raw = r[j] / scale[j];
      v = std::max(v, (has_eq && j == 0) ? std::abs(raw) : std::max(0.0, raw));
    }
    return v;
  };

  int sweeps = 0;
  double prev_violation = std::numeric_limits<double>::infinity();
  result.status = SolverStatus::max_iter;
  for (int outer = 0; outer < 500 && sweeps < settings.max_iterations; ++outer) {
    while (sweeps < settings.max_iterations) {
      cd.sweep(mult, rho, rng);
      ++sweeps;
      if (cd.subproblem_residual(mult, rho) <= inner_tol) break;
      if (sweeps % kPolishEvery == 0 && cd.polish() &&
          cd.subproblem_residual(mult, rho) <= inner_tol)
        break;
    }
    if (m == 0) {
      if (cd.subproblem_residual(mult, rho) <= inner_tol) result.status = SolverStatus::converged;
      break;
    }
    mult = cd.effective(mult, rho);
    const double violation = unscaled_violation(cd.residuals());
    Vector unscaled_mult = mult.cwiseProduct(scale);
    const KktResiduals k = kkt_residuals(problem, cd.x(), unscaled_mult);
    if (settings.verbosity > 0)
      std::fprintf(stderr, "qp outer %d sweeps=%d rho=%.3g viol=%.3g stat=%.3g compl=%.3g\n",
                   outer, sweeps, rho, violation, k.stationarity, k.complementarity);
    if (k.primal_violation <= feas_target && k.stationarity <= settings.kkt_tolerance &&
        k.complementarity <= settings.kkt_tolerance) {
      result.status = SolverStatus::converged;
      break;
    }
    if (violation > feas_target && violation > 0.25 * prev_violation) rho *= 10.0;
    if (rho > 1e12 && violation > feas_target) {
      result.status = SolverStatus::infeasible;
      break;
    }
    prev_violation = violation;
  }

  result.multipliers = mult.cwiseProduct(scale);
  result.iterations = sweeps;
  auto certified = [&](const KktResiduals& k) {
    return k.primal_violation <= feas_target && k.stationarity <= settings.kkt_tolerance &&
           k.complementarity <= settings.kkt_tolerance;
  };
  Vector x = cd.x();
  KktResiduals kkt = kkt_residuals(problem, x, result.multipliers);
  if (has_eq && result.status != SolverStatus::infeasible) {
    // Exact equality repair; kept unless it breaks a certified point.
    Vector eq_rhs(1);
    eq_rhs[0] = problem.equality->rhs;
    cd.repair_equality(eq_rhs, problem.equality->coefficients);
    const KktResiduals repaired = kkt_residuals(problem, cd.x(), result.multipliers);
    if (certified(repaired) || !certified(kkt)) {
      x = cd.x();
      kkt = repaired;
    }
  }
  result.point = x;
  result.objective_value = problem.objective(x);
  result.kkt = kkt;
  if (result.status != SolverStatus::infeasible)
    result.status = certified(kkt) ? SolverStatus::converged : SolverStatus::max_iter;
  return result;
}

}  // namespace fairbound::optim
