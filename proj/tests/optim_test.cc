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

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "fairbound/optim.hpp"
#include "oracles.hpp"

namespace fairbound::optim {
namespace {

SmoothProblem Shifted(const Vector& target) {
  SmoothProblem p;
  p.dimension = target.size();
  p.objective = [target](const Vector& x, Vector* g) {
    if (g) *g = 2.0 * (x - target);
    return (x - target).squaredNorm();
  };
  p.initial_point = Vector::Zero(target.size());
  return p;
}

TEST(MinimizeSmoothTest, UnconstrainedNormIsMinimizedAtOrigin) {
  SmoothProblem p = Shifted(Vector::Zero(3));
  p.initial_point = Vector::Constant(3, 1.5);
  const SolverResult r = minimize_smooth(p);
  EXPECT_EQ(r.status, SolverStatus::converged);
  EXPECT_LT(r.point.norm(), 1e-6);
  EXPECT_LT(r.objective_value, 1e-12);
}

TEST(MinimizeSmoothTest, HalfspaceProjection) {
  SmoothProblem p = Shifted(Vector::Unit(2, 0) * 2.0);
  p.linear_lhs = Matrix{{1.0, 0.0}};
  p.linear_rhs = Vector::Ones(1);
  const SolverResult r = minimize_smooth(p);
  ASSERT_EQ(r.status, SolverStatus::converged);
  EXPECT_NEAR(r.point[0], 1.0, 1e-5);
  EXPECT_NEAR(r.point[1], 0.0, 1e-8);
  EXPECT_NEAR(r.multipliers[0], 2.0, 1e-4);
  EXPECT_LE(r.kkt.stationarity, 1e-5);
  EXPECT_LE(r.kkt.primal_violation, 1e-5);
}

TEST(MinimizeSmoothTest, ConvexBlockDisk) {
  // Closest point of the unit disk to (3, 4) is (0.6, 0.8).
  Vector target(2);
  target << 3.0, 4.0;
  SmoothProblem p = Shifted(target);
  p.convex.push_back({1, [](const Vector& x, Vector& v, Matrix* j) {
                        v.resize(1);
                        v[0] = x.squaredNorm() - 1.0;
                        if (j) *j = 2.0 * x.transpose();
                      }});
  const SolverResult r = minimize_smooth(p);
  ASSERT_EQ(r.status, SolverStatus::converged);
  EXPECT_NEAR(r.point[0], 0.6, 1e-5);
  EXPECT_NEAR(r.point[1], 0.8, 1e-5);
  // Stationarity: 2(x - t) + 2 lambda x = 0 gives lambda = 4.
  EXPECT_NEAR(r.multipliers[0], 4.0, 1e-3);
}

TEST(MinimizeSmoothTest, InfeasibleLinearSystem) {
  SmoothProblem p = Shifted(Vector::Zero(1));
  p.linear_lhs = Matrix{{1.0}, {-1.0}};
  p.linear_rhs = Vector{{-1.0, -1.0}};
  const SolverResult r = minimize_smooth(p);
  EXPECT_EQ(r.status, SolverStatus::infeasible);
}

TEST(MinimizeSmoothTest, DeterministicBitwise) {
  Vector target(3);
  target << 1.0, -2.0, 0.5;
  SmoothProblem p = Shifted(target);
  p.linear_lhs = Matrix{{1.0, 1.0, 1.0}, {-1.0, 0.0, 2.0}};
  p.linear_rhs = Vector{{0.0, 0.1}};
  const SolverResult a = minimize_smooth(p);
  const SolverResult b = minimize_smooth(p);
  EXPECT_EQ(a.iterations, b.iterations);
  for (Index i = 0; i < 3; ++i) EXPECT_EQ(a.point[i], b.point[i]);
}

TEST(MinimizeSmoothTest, BeatsRandomFeasiblePoints) {
  Vector target(2);
  target << 2.0, 1.0;
  SmoothProblem p = Shifted(target);
  p.linear_lhs = Matrix{{1.0, 1.0}, {1.0, -2.0}};
  p.linear_rhs = Vector{{1.0, 0.5}};
  const SolverResult r = minimize_smooth(p);
  ASSERT_EQ(r.status, SolverStatus::converged);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  int accepted = 0;
  while (accepted < 100) {
    Vector x(2);
    x << u(rng), u(rng);
    if (((p.linear_lhs * x - p.linear_rhs).array() > 0.0).any()) continue;
    ++accepted;
    EXPECT_LE(r.objective_value, p.objective(x, nullptr) + 1e-9);
  }
}

TEST(KktResidualsTest, AnalyticPoints) {
  SmoothProblem p = Shifted(Vector::Unit(2, 0) * 2.0);
  KktResiduals k = kkt_residuals(p, Vector::Unit(2, 0) * 2.0, Vector());
  EXPECT_EQ(k.stationarity, 0.0);
  p.linear_lhs = Matrix{{1.0, 0.0}};
  p.linear_rhs = Vector::Ones(1);
  k = kkt_residuals(p, Vector::Unit(2, 0), Vector::Constant(1, 2.0));
  EXPECT_NEAR(k.stationarity, 0.0, 1e-14);
  EXPECT_NEAR(k.primal_violation, 0.0, 1e-14);
  EXPECT_NEAR(k.complementarity, 0.0, 1e-14);
}

TEST(KktResidualsTest, NonOptimalPointHasStationarityResidual) {
  SmoothProblem p = Shifted(Vector::Unit(2, 0) * 2.0);
  p.linear_lhs = Matrix{{1.0, 0.0}};
  p.linear_rhs = Vector::Ones(1);
  Vector x(2);
  x << 0.3, -0.7;
  // grad = 2(x - t) = (-3.4, -1.4); plus lambda e1 with lambda = 0.5.
  const KktResiduals k = kkt_residuals(p, x, Vector::Constant(1, 0.5));
  EXPECT_NEAR(k.stationarity, std::hypot(-2.9, -1.4), 1e-12);
  EXPECT_NEAR(k.complementarity, 0.35, 1e-12);
}

TEST(KktResidualsTest, NegativeMultiplierRejected) {
  SmoothProblem p = Shifted(Vector::Zero(1));
  p.linear_lhs = Matrix{{1.0}};
  p.linear_rhs = Vector::Ones(1);
  EXPECT_THROW(kkt_residuals(p, Vector::Zero(1), Vector::Constant(1, -1.0)),
               std::invalid_argument);
}

QuadraticProblem IdentityQp(Index n, double upper) {
  QuadraticProblem qp;
  qp.hessian = QuadraticForm::dense(Matrix::Identity(n, n));
  qp.linear = -Vector::Ones(n);
  qp.lower = Vector::Zero(n);
  qp.upper = Vector::Constant(n, upper);
  return qp;
}

TEST(SolveQpTest, SeparableQuadratic) {
  const SolverResult r = solve_qp(IdentityQp(4, 10.0));
  ASSERT_EQ(r.status, SolverStatus::converged);
  EXPECT_TRUE(r.point.isApprox(Vector::Ones(4), 1e-8));
}

TEST(SolveQpTest, SymmetricPairWithEquality) {
  QuadraticProblem qp = IdentityQp(2, std::numeric_limits<double>::infinity());
  qp.equality = LinearEquality{Vector{{1.0, -1.0}}, 0.0};
  const SolverResult r = solve_qp(qp);
  ASSERT_EQ(r.status, SolverStatus::converged);
  EXPECT_NEAR(r.point[0], 1.0, 1e-6);
  EXPECT_NEAR(r.point[1], 1.0, 1e-6);
}

TEST(SolveQpTest, FactoredMatchesDense) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Matrix f(3, 6);
  for (Index i = 0; i < f.size(); ++i) f.data()[i] = g(rng);
  QuadraticProblem dense = IdentityQp(6, 2.0);
  dense.hessian = QuadraticForm::dense(f.transpose() * f);
  dense.inequality_lhs = Matrix::Ones(1, 6);
  dense.inequality_rhs = Vector::Constant(1, 3.0);
  QuadraticProblem factored = dense;
  factored.hessian = QuadraticForm::factored(f);
  SolverSettings s;
  s.kkt_tolerance = 1e-9;
  const SolverResult a = solve_qp(dense, s);
  const SolverResult b = solve_qp(factored, s);
  ASSERT_EQ(a.status, SolverStatus::converged);
  ASSERT_EQ(b.status, SolverStatus::converged);
  EXPECT_NEAR(a.objective_value, b.objective_value, 1e-8);
}

TEST(SolveQpTest, WarmStartReachesSameOptimum) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-1.0, 3.0);
  Matrix f(3, 60);
  for (Index i = 0; i < f.size(); ++i) f.data()[i] = g(rng);
  QuadraticProblem qp = IdentityQp(60, 1.0);
  qp.hessian = QuadraticForm::factored(f);
  for (Index i = 0; i < 60; ++i) qp.linear[i] = -1.0 + 0.3 * g(rng);
  SolverSettings s;
  s.kkt_tolerance = 1e-9;
  const SolverResult cold = solve_qp(qp, s);
  qp.initial_point = Vector::NullaryExpr(60, [&] { return u(rng); });
  const SolverResult warm = solve_qp(qp, s);
  ASSERT_EQ(cold.status, SolverStatus::converged);
  ASSERT_EQ(warm.status, SolverStatus::converged);
  EXPECT_NEAR(cold.objective_value, warm.objective_value, 1e-9);
  qp.initial_point = Vector::Zero(59);
  EXPECT_THROW(solve_qp(qp, s), std::invalid_argument);
}

TEST(SolveQpTest, NonPsdRejected) {
  QuadraticProblem qp = IdentityQp(2, 1.0);
  qp.hessian = QuadraticForm::dense(Matrix{{1.0, 0.0}, {0.0, -1.0}});
  EXPECT_THROW(solve_qp(qp), std::invalid_argument);
}

TEST(SolveQpTest, InfeasibleInequality) {
  QuadraticProblem qp = IdentityQp(2, 1.0);
  qp.inequality_lhs = Matrix{{1.0, 1.0}};
  qp.inequality_rhs = Vector::Constant(1, -1.0);
  EXPECT_EQ(solve_qp(qp).status, SolverStatus::infeasible);
}

// Hard-margin-like dual of six separable points in the plane, compared with
// exhaustive enumeration of the support set.
TEST(SolveQpTest, SixPointSvmDualMatchesActiveSetOracle) {
  Matrix x{{2.0, 2.0}, {3.0, 1.0}, {2.5, 3.0}, {-1.0, -1.0}, {-2.0, 0.5}, {-0.5, -2.5}};
  Vector y{{1.0, 1.0, 1.0, -1.0, -1.0, -1.0}};
  const double cost = 5.0;
  const Matrix yx = y.asDiagonal() * x;
  QuadraticProblem qp;
  qp.hessian = QuadraticForm::dense(yx * yx.transpose());
  qp.linear = -Vector::Ones(6);
  qp.lower = Vector::Zero(6);
  qp.upper = Vector::Constant(6, cost);
  qp.equality = LinearEquality{y, 0.0};
  SolverSettings s;
  s.kkt_tolerance = 1e-9;
  const SolverResult r = solve_qp(qp, s);
  ASSERT_EQ(r.status, SolverStatus::converged);
  const double oracle = testing_oracles::enumerate_box_qp(qp);
  EXPECT_NEAR(r.objective_value, oracle, 1e-5);
  EXPECT_LE(r.kkt.primal_violation, 1e-8);
}

TEST(SolveQpTest, RandomBoxQpsMatchEnumeration) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix f(4, 5);
    for (Index i = 0; i < f.size(); ++i) f.data()[i] = g(rng);
    QuadraticProblem qp;
    qp.hessian = QuadraticForm::dense(f.transpose() * f + 0.1 * Matrix::Identity(5, 5));
    qp.linear = Vector::NullaryExpr(5, [&] { return g(rng); });
    qp.lower = Vector::Zero(5);
    qp.upper = Vector::Constant(5, 1.5);
    qp.equality = LinearEquality{Vector{{1.0, -1.0, 1.0, -1.0, 1.0}}, 0.0};
    qp.inequality_lhs = Matrix::NullaryExpr(1, 5, [&] { return g(rng); });
    qp.inequality_rhs = Vector::Constant(1, 0.2);
    SolverSettings s;
    s.kkt_tolerance = 1e-9;
    const SolverResult r = solve_qp(qp, s);
    ASSERT_EQ(r.status, SolverStatus::converged)
        << trial << " st=" << r.kkt.stationarity << " pv=" << r.kkt.primal_violation
        << " cs=" << r.kkt.complementarity << " it=" << r.iterations;
    EXPECT_NEAR(r.objective_value, testing_oracles::enumerate_box_qp(qp), 1e-6) << trial;
  }
}

}  // namespace
}  // namespace fairbound::optim
