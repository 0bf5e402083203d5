#include "alipmpc/qp_solver.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace alipmpc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CoreResult {
  VectorXd x;
  VectorXd eq_dual;
  VectorXd bound_dual;
  bool optimal = false;
  int iterations = 0;
};

// Primal active-set iteration from a point that satisfies the boxes and the
// equalities. The working set only ever contains bound constraints, so each
// subproblem is an equality-constrained QP on the free variables:
//   [H_FF  -A_F'] [x_F]   [-g_F - H_FB x_B]
//   [A_F    0  ] [ nu ] = [ b  - A_B x_B  ]
CoreResult active_set_core(const MatrixXd& H, const VectorXd& g,
                           const MatrixXd& A, const VectorXd& b,
                           const VectorXd& lb, const VectorXd& ub, VectorXd w,
                           int max_iters) {
  const int n = static_cast<int>(w.size());
  const int m = static_cast<int>(b.size());

  std::vector<int> st(n, 0);  // 0 free, -1 at lower, +1 at upper
  for (int i = 0; i < n; ++i) {
    const double span = 1e-11 * (1.0 + std::abs(w[i]));
    if (std::isfinite(lb[i]) && w[i] - lb[i] <= span) {
      w[i] = lb[i];
      st[i] = -1;
    } else if (std::isfinite(ub[i]) && ub[i] - w[i] <= span) {
      w[i] = ub[i];
      st[i] = 1;
    }
  }

  VectorXd nu = VectorXd::Zero(m);
  CoreResult out;
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    std::vector<int> F;
    F.reserve(n);
    for (int i = 0; i < n; ++i) {
      if (st[i] == 0) F.push_back(i);
    }
    const int nf = static_cast<int>(F.size());

    VectorXd d = VectorXd::Zero(n);
    if (nf + m > 0) {
      MatrixXd K = MatrixXd::Zero(nf + m, nf + m);
      VectorXd rhs = VectorXd::Zero(nf + m);
      for (int a = 0; a < nf; ++a) {
        for (int c = 0; c < nf; ++c) K(a, c) = H(F[a], F[c]);
        double r = -g[F[a]];
        for (int i = 0; i < n; ++i) {
          if (st[i] != 0) r -= H(F[a], i) * w[i];
        }
        rhs[a] = r;
      }
      for (int r = 0; r < m; ++r) {
        for (int a = 0; a < nf; ++a) {
          K(nf + r, a) = A(r, F[a]);
          K(a, nf + r) = -A(r, F[a]);
        }
        double rv = b[r];
        for (int i = 0; i < n; ++i) {
          if (st[i] != 0) rv -= A(r, i) * w[i];
        }
        rhs[nf + r] = rv;
      }

      Eigen::FullPivLU<MatrixXd> lu(K);
      if (!lu.isInvertible()) {
        // Redundant active rows; a tiny diagonal shift keeps the step
        // well-defined without changing the exact solve when K is regular.
        K.diagonal().array() += 1e-12;
        lu.compute(K);
      }
      const VectorXd sol = lu.solve(rhs);
      if (!sol.allFinite()) break;
      for (int a = 0; a < nf; ++a) d[F[a]] = sol[a] - w[F[a]];
      nu = sol.tail(m);
    }

    const double step_inf = d.lpNorm<Eigen::Infinity>();
    if (step_inf <= 1e-12 * (1.0 + w.lpNorm<Eigen::Infinity>())) {
      // Stationary on the working set; test bound multipliers.
      VectorXd grad = H * w + g;
      if (m > 0) grad -= A.transpose() * nu;
      const double tol = 1e-9 * (1.0 + grad.lpNorm<Eigen::Infinity>());
      int release = -1;
      double worst = tol;
      for (int i = 0; i < n; ++i) {
        if (st[i] == 0) continue;
        if (std::isfinite(lb[i]) && std::isfinite(ub[i]) &&
            ub[i] - lb[i] < 1e-15) {
          continue;  // pinned variable
        }
        const double viol = st[i] == -1 ? -grad[i] : grad[i];
        if (viol > worst) {
          worst = viol;
          release = i;
        }
      }
      if (release < 0) {
        out.x = w;
        out.eq_dual = nu;
        out.bound_dual = VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) {
          if (st[i] != 0) out.bound_dual[i] = grad[i];
        }
        out.optimal = true;
        out.iterations = iter + 1;
        return out;
      }
      st[release] = 0;
      continue;
    }

    // Ratio test toward the EQP optimum.
    double alpha = 1.0;
    int block = -1, block_dir = 0;
    for (int i : F) {
      const double di = d[i];
      double r = kInf;
      int dir = 0;
      if (di > 1e-14 && std::isfinite(ub[i])) {
        r = (ub[i] - w[i]) / di;
        dir = 1;
      } else if (di < -1e-14 && std::isfinite(lb[i])) {
        r = (lb[i] - w[i]) / di;
        dir = -1;
      }
      if (r < alpha - 1e-15) {
        alpha = std::max(r, 0.0);
        block = i;
        block_dir = dir;
      }
    }
    for (int i : F) w[i] += alpha * d[i];
    if (block >= 0) {
      w[block] = block_dir == 1 ? ub[block] : lb[block];
      st[block] = block_dir;
    }
  }

  out.x = w;
  out.eq_dual = nu;
  out.bound_dual = VectorXd::Zero(n);
  out.optimal = false;
  out.iterations = iter;
  return out;
}

VectorXd project_box(VectorXd x, const VectorXd& lb, const VectorXd& ub) {
  for (int i = 0; i < x.size(); ++i) {
    x[i] = std::min(std::max(x[i], lb[i]), ub[i]);
  }
  return x;
}

}  // namespace

void QpProblem::validate() const {
  const int n = num_vars();
  const int m = num_eq();
  if (H.rows() != n || H.cols() != n || lb.size() != n || ub.size() != n ||
      A.rows() != m || (m > 0 && A.cols() != n)) {
    throw std::invalid_argument("QpProblem: inconsistent dimensions");
  }
  for (int i = 0; i < n; ++i) {
    if (lb[i] > ub[i]) throw std::invalid_argument("QpProblem: lb > ub");
  }
}

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Solved: return "solved";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::Unbounded: return "unbounded";
    case QpStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

QpResult solve_qp_from_feasible(const QpProblem& prob,
                                const Eigen::VectorXd& w0) {
  prob.validate();
  const int n = prob.num_vars();
  const int m = prob.num_eq();
  const CoreResult core =
      active_set_core(prob.H, prob.g, prob.A, prob.b, prob.lb, prob.ub, w0,
                      200 + 20 * n);
  QpResult res;
  res.x = core.x;
  res.eq_dual = core.eq_dual;
  res.bound_dual = core.bound_dual;
  res.iterations = core.iterations;
  res.eq_residual =
      m > 0 ? (prob.A * core.x - prob.b).lpNorm<Eigen::Infinity>() : 0.0;
  res.status = core.optimal ? QpStatus::Solved : QpStatus::IterationLimit;
  if (!core.x.allFinite()) res.status = QpStatus::Unbounded;
  return res;
}

QpResult solve_qp(const QpProblem& prob,
                  const std::optional<Eigen::VectorXd>& x0) {
  prob.validate();
  const int n = prob.num_vars();
  const int m = prob.num_eq();
  const int max_iters = 200 + 20 * (n + 2 * m);

  VectorXd start = x0 && x0->size() == n ? *x0 : VectorXd::Zero(n);
  start = project_box(std::move(start), prob.lb, prob.ub);

  QpResult res;
  if (m == 0) {
    const CoreResult core = active_set_core(
        prob.H, prob.g, MatrixXd::Zero(0, n), VectorXd::Zero(0), prob.lb,
        prob.ub, start, max_iters);
    res.x = core.x;
    res.eq_dual = VectorXd::Zero(0);
    res.bound_dual = core.bound_dual;
    res.iterations = core.iterations;
    res.eq_residual = 0.0;
    res.status = core.optimal ? QpStatus::Solved : QpStatus::IterationLimit;
    if (!core.x.allFinite()) res.status = QpStatus::Unbounded;
    return res;
  }

  // Elastic variables: [x, s_plus, s_minus], A x + s_plus - s_minus = b.
  const int N = n + 2 * m;
  const double h_scale = std::max(1.0, prob.H.diagonal().maxCoeff());
  const double eps_s = 1e-8 * h_scale;

  MatrixXd He = MatrixXd::Zero(N, N);
  He.topLeftCorner(n, n) = prob.H;
  He.bottomRightCorner(2 * m, 2 * m) =
      eps_s * MatrixXd::Identity(2 * m, 2 * m);
  MatrixXd Ae = MatrixXd::Zero(m, N);
  Ae.leftCols(n) = prob.A;
  Ae.block(0, n, m, m) = MatrixXd::Identity(m, m);
  Ae.block(0, n + m, m, m) = -MatrixXd::Identity(m, m);
  VectorXd lbe = VectorXd::Zero(N), ube = VectorXd::Constant(N, kInf);
  lbe.head(n) = prob.lb;
  ube.head(n) = prob.ub;

  VectorXd w0 = VectorXd::Zero(N);
  w0.head(n) = start;
  const VectorXd r0 = prob.b - prob.A * start;
  w0.segment(n, m) = r0.cwiseMax(0.0);
  w0.segment(n + m, m) = (-r0).cwiseMax(0.0);

  const double g_scale = 1.0 + prob.g.lpNorm<Eigen::Infinity>();
  double mu = 10.0 * g_scale;
  const double mu_max = std::max(1e12, 1e6 * g_scale);
  const double feas_tol = 1e-10 * (1.0 + prob.b.lpNorm<Eigen::Infinity>());

  VectorXd ge = VectorXd::Zero(N);
  ge.head(n) = prob.g;

  CoreResult core;
  int total_iters = 0;
  while (true) {
    ge.tail(2 * m).setConstant(mu);
    core = active_set_core(He, ge, Ae, prob.b, lbe, ube, w0, max_iters);
    total_iters += core.iterations;
    const double slack_sum = core.x.tail(2 * m).sum();
    if (slack_sum <= feas_tol || mu >= mu_max) {
      res.status = slack_sum <= feas_tol
                       ? (core.optimal ? QpStatus::Solved
                                       : QpStatus::IterationLimit)
                       : QpStatus::Infeasible;
      break;
    }
    w0 = core.x;
    mu *= 100.0;
  }

  res.x = core.x.head(n);
  res.eq_dual = core.eq_dual;
  res.bound_dual = core.bound_dual.head(n);
  res.iterations = total_iters;
  res.eq_residual = (prob.A * res.x - prob.b).lpNorm<Eigen::Infinity>();
  if (!res.x.allFinite()) res.status = QpStatus::Unbounded;
  return res;
}

}  // namespace alipmpc
