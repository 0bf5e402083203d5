#pragma once

#include <optional>

#include <Eigen/Dense>

#include "alipmpc/types.hpp"

namespace alipmpc {

/// Convex QP: min 1/2 x'Hx + g'x  s.t.  A x = b,  lb <= x <= ub.
/// H must be positive semidefinite (every caller here passes a positive
/// diagonal). Infinite bounds are allowed.
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd A;  // may have zero rows
  Eigen::VectorXd b;
  Eigen::VectorXd lb, ub;

  int num_vars() const { return static_cast<int>(g.size()); }
  int num_eq() const { return static_cast<int>(b.size()); }
  void validate() const;
};

enum class QpStatus { Solved, Infeasible, Unbounded, IterationLimit };

const char* to_string(QpStatus s);

struct QpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd eq_dual;     // multipliers of A x = b
  Eigen::VectorXd bound_dual;  // gradient of the Lagrangian at active bounds
  QpStatus status = QpStatus::Solved;
  int iterations = 0;
  double eq_residual = 0.0;    // ||Ax - b||_inf at the returned point
};

/// Deterministic primal active-set solve. Equality constraints are handled
/// through an exact-penalty elastic reformulation: slack variables absorb
/// A x - b and their L1 price is escalated until the slacks vanish, which
/// reproduces the hard-constrained optimum exactly for feasible problems
/// and yields the minimum-residual classification otherwise.
QpResult solve_qp(const QpProblem& prob,
                  const std::optional<Eigen::VectorXd>& x0 = std::nullopt);

/// Lower-level entry for callers that can hand over a start point already
/// satisfying boxes and equalities exactly (the SCP layer builds elastic
/// subproblems with that property). Skips the penalty escalation.
QpResult solve_qp_from_feasible(const QpProblem& prob,
                                const Eigen::VectorXd& w0);

}  // namespace alipmpc
