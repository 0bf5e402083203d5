#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "alipmpc/qp_solver.hpp"
#include "alipmpc/rng.hpp"
#include "support/oracles.hpp"

using namespace alipmpc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

QpProblem scalar_problem(double target, double lo, double hi) {
  QpProblem qp;
  qp.H = MatrixXd::Constant(1, 1, 2.0);
  qp.g = VectorXd::Constant(1, -2.0 * target);
  qp.A = MatrixXd::Zero(0, 1);
  qp.b = VectorXd::Zero(0);
  qp.lb = VectorXd::Constant(1, lo);
  qp.ub = VectorXd::Constant(1, hi);
  return qp;
}

}  // namespace

TEST_CASE("interior and clipped scalar optima") {
  const QpResult inside = solve_qp(scalar_problem(1.0, 0.0, 2.0));
  CHECK(inside.status == QpStatus::Solved);
  CHECK(inside.x[0] == doctest::Approx(1.0).epsilon(1e-12));

  const QpResult clipped = solve_qp(scalar_problem(3.0, 0.0, 2.0));
  CHECK(clipped.status == QpStatus::Solved);
  CHECK(clipped.x[0] == 2.0);
  // Multiplier of the active upper bound is the (negative) gradient there.
  CHECK(clipped.bound_dual[0] == doctest::Approx(2.0 * 2.0 - 2.0 * 3.0));
}

TEST_CASE("random box QPs match the projected-gradient oracle") {
  Xoshiro256pp rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 10;
    MatrixXd M(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) M(i, j) = rng.uniform(-1.0, 1.0);
    }
    QpProblem qp;
    qp.H = M.transpose() * M + 0.5 * MatrixXd::Identity(n, n);
    qp.g = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) qp.g[i] = rng.uniform(-2.0, 2.0);
    qp.A = MatrixXd::Zero(0, n);
    qp.b = VectorXd::Zero(0);
    qp.lb = VectorXd(n);
    qp.ub = VectorXd(n);
    for (int i = 0; i < n; ++i) {
      const double a = rng.uniform(-1.5, 0.5);
      qp.lb[i] = a;
      qp.ub[i] = a + rng.uniform(0.1, 2.0);
    }
    const QpResult res = solve_qp(qp);
    REQUIRE(res.status == QpStatus::Solved);
    const VectorXd ref =
        test::projected_gradient(qp.H, qp.g, qp.lb, qp.ub, 100000);
    CHECK((res.x - ref).lpNorm<Eigen::Infinity>() < 1e-6);
  }
}

TEST_CASE("equality constrained QPs match KKT enumeration") {
  Xoshiro256pp rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5, m = 2;
    QpProblem qp;
    qp.H = MatrixXd::Zero(n, n);
    qp.g = VectorXd(n);
    for (int i = 0; i < n; ++i) {
      qp.H(i, i) = rng.uniform(0.5, 4.0);
      qp.g[i] = rng.uniform(-2.0, 2.0);
    }
    qp.A = MatrixXd(m, n);
    for (int r = 0; r < m; ++r) {
      for (int i = 0; i < n; ++i) qp.A(r, i) = rng.uniform(-1.0, 1.0);
    }
    // Make the equalities satisfiable inside the boxes by construction.
    VectorXd feasible(n);
    qp.lb = VectorXd(n);
    qp.ub = VectorXd(n);
    for (int i = 0; i < n; ++i) {
      feasible[i] = rng.uniform(-1.0, 1.0);
      qp.lb[i] = feasible[i] - rng.uniform(0.05, 1.0);
      qp.ub[i] = feasible[i] + rng.uniform(0.05, 1.0);
    }
    qp.b = qp.A * feasible;

    const QpResult res = solve_qp(qp);
    REQUIRE(res.status == QpStatus::Solved);
    CHECK(res.eq_residual < 1e-8);
    const auto oracle =
        test::kkt_enumerate(qp.H, qp.g, qp.A, qp.b, qp.lb, qp.ub);
    REQUIRE(oracle.has_value());
    CHECK((res.x - *oracle).lpNorm<Eigen::Infinity>() < 1e-7);
  }
}

TEST_CASE("infeasible equalities are classified") {
  QpProblem qp = scalar_problem(0.0, 0.0, 1.0);
  qp.A = MatrixXd::Constant(1, 1, 1.0);
  qp.b = VectorXd::Constant(1, 5.0);  // x = 5 vs x <= 1
  const QpResult res = solve_qp(qp);
  CHECK(res.status == QpStatus::Infeasible);
  // The returned point still minimizes the residual.
  CHECK(res.x[0] == doctest::Approx(1.0));
}

TEST_CASE("solutions are deterministic") {
  Xoshiro256pp rng(5);
  QpProblem qp;
  const int n = 8;
  qp.H = MatrixXd::Zero(n, n);
  qp.g = VectorXd(n);
  for (int i = 0; i < n; ++i) {
    qp.H(i, i) = rng.uniform(0.5, 3.0);
    qp.g[i] = rng.uniform(-1.0, 1.0);
  }
  qp.A = MatrixXd::Zero(0, n);
  qp.b = VectorXd::Zero(0);
  qp.lb = VectorXd::Constant(n, -0.3);
  qp.ub = VectorXd::Constant(n, 0.4);
  const QpResult a = solve_qp(qp);
  const QpResult b = solve_qp(qp);
  CHECK(a.x == b.x);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("dimension mismatches are rejected") {
  QpProblem qp = scalar_problem(0.0, 0.0, 1.0);
  qp.g = VectorXd::Zero(2);
  CHECK_THROWS_AS(solve_qp(qp), std::invalid_argument);
}
