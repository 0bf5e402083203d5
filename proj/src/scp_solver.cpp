#include "alipmpc/scp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alipmpc/qp_solver.hpp"

namespace alipmpc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int zx_at(int k) { return 5 * k; }
int zy_at(int k) { return 5 * k + 1; }
int sg_at(int k) { return 5 * k + 2; }
int ux_at(int k) { return 5 * k + 3; }
int uy_at(int k) { return 5 * k + 4; }

struct Packed {
  VectorXd lb, ub, h_diag, g, scale;
};

Packed pack_problem(const MpcInstance& inst) {
  const int n = inst.num_vars();
  Packed p;
  p.lb.resize(n);
  p.ub.resize(n);
  p.h_diag.resize(n);
  p.g.resize(n);
  p.scale = VectorXd::Ones(n);
  for (int k = 0; k < inst.N; ++k) {
    const double b = inst.beta[k];
    const double w[5] = {b * inst.alpha[0], b * inst.alpha[1],
                         b * inst.alpha[2], b * inst.alpha[3],
                         b * inst.alpha[4]};
    const double des[5] = {inst.z_des[k].x(), inst.z_des[k].y(),
                           inst.sigma_des, inst.u_des[k].x(),
                           inst.u_des[k].y()};
    const double lo[5] = {inst.z_lo[k].x(), inst.z_lo[k].y(), inst.sigma_lo,
                          inst.u_lo[k].x(), inst.u_lo[k].y()};
    const double hi[5] = {inst.z_hi[k].x(), inst.z_hi[k].y(), inst.sigma_hi,
                          inst.u_hi[k].x(), inst.u_hi[k].y()};
    for (int j = 0; j < 5; ++j) {
      const int i = 5 * k + j;
      p.h_diag[i] = 2.0 * w[j];
      p.g[i] = -2.0 * w[j] * des[j];
      p.lb[i] = lo[j];
      p.ub[i] = hi[j];
    }
    p.scale[sg_at(k)] = std::max(inst.sigma_des, 1.0);
  }
  return p;
}

VectorXd clamp_to(const VectorXd& x, const VectorXd& lb, const VectorXd& ub) {
  return x.cwiseMax(lb).cwiseMin(ub);
}

double cost_of(const Packed& p, const VectorXd& x) {
  return 0.5 * x.dot(p.h_diag.asDiagonal() * x) + p.g.dot(x);
}

// Cost reported outside is the plain weighted sum of squares; cost_of drops
// the constant term, so convert through the instance.
double true_cost(const MpcInstance& inst, const VectorXd& x) {
  double f = 0.0;
  for (int k = 0; k < inst.N; ++k) {
    const double b = inst.beta[k];
    const double dzx = x[zx_at(k)] - inst.z_des[k].x();
    const double dzy = x[zy_at(k)] - inst.z_des[k].y();
    const double ds = x[sg_at(k)] - inst.sigma_des;
    const double dux = x[ux_at(k)] - inst.u_des[k].x();
    const double duy = x[uy_at(k)] - inst.u_des[k].y();
    f += b * (inst.alpha[0] * dzx * dzx + inst.alpha[1] * dzy * dzy +
              inst.alpha[2] * ds * ds + inst.alpha[3] * dux * dux +
              inst.alpha[4] * duy * duy);
  }
  return f;
}

VectorXd constraint_eval(const MpcInstance& inst, const VectorXd& x) {
  VectorXd c(2 * inst.N);
  for (int k = 0; k < inst.N; ++k) {
    const double px = k == 0 ? inst.z0.x() : x[zx_at(k - 1)];
    const double py = k == 0 ? inst.z0.y() : x[zy_at(k - 1)];
    c[2 * k] = x[zx_at(k)] - x[sg_at(k)] * px + x[ux_at(k)];
    c[2 * k + 1] = x[zy_at(k)] - x[sg_at(k)] * py + x[uy_at(k)];
  }
  return c;
}

MatrixXd constraint_jacobian(const MpcInstance& inst, const VectorXd& x) {
  MatrixXd J = MatrixXd::Zero(2 * inst.N, inst.num_vars());
  for (int k = 0; k < inst.N; ++k) {
    const double px = k == 0 ? inst.z0.x() : x[zx_at(k - 1)];
    const double py = k == 0 ? inst.z0.y() : x[zy_at(k - 1)];
    J(2 * k, zx_at(k)) = 1.0;
    J(2 * k, ux_at(k)) = 1.0;
    J(2 * k, sg_at(k)) = -px;
    J(2 * k + 1, zy_at(k)) = 1.0;
    J(2 * k + 1, uy_at(k)) = 1.0;
    J(2 * k + 1, sg_at(k)) = -py;
    if (k > 0) {
      J(2 * k, zx_at(k - 1)) = -x[sg_at(k)];
      J(2 * k + 1, zy_at(k - 1)) = -x[sg_at(k)];
    }
  }
  return J;
}

struct SubproblemOut {
  VectorXd x;
  VectorXd eq_dual;
  bool clean = true;  // active-set iteration converged
};

// Convex subproblem about xbar: exact quadratic cost, linearized dynamics
// made elastic with L1 price mu, boxes intersected with the trust region.
// `shift` carries the second-order correction of the constraint right-hand
// side (zero on the first solve of an iteration).
SubproblemOut solve_subproblem(const MpcInstance& inst, const Packed& p,
                               const VectorXd& xbar, const VectorXd& cbar,
                               const MatrixXd& J, double mu, double radius,
                               const VectorXd& shift) {
  const int n = inst.num_vars();
  const int m = 2 * inst.N;
  const int ntot = n + 2 * m;

  QpProblem qp;
  qp.H = MatrixXd::Zero(ntot, ntot);
  qp.H.topLeftCorner(n, n) = MatrixXd(p.h_diag.asDiagonal());
  const double eps_s = 1e-8 * std::max(1.0, p.h_diag.maxCoeff());
  qp.H.bottomRightCorner(2 * m, 2 * m) =
      eps_s * MatrixXd::Identity(2 * m, 2 * m);
  qp.g = VectorXd::Zero(ntot);
  qp.g.head(n) = p.g;
  qp.g.tail(2 * m).setConstant(mu);

  qp.A = MatrixXd::Zero(m, ntot);
  qp.A.leftCols(n) = J;
  qp.A.block(0, n, m, m) = MatrixXd::Identity(m, m);
  qp.A.block(0, n + m, m, m) = -MatrixXd::Identity(m, m);
  qp.b = J * xbar - cbar;

  qp.lb = VectorXd::Zero(ntot);
  qp.ub = VectorXd::Constant(ntot, kInf);
  qp.lb.head(n) = p.lb.cwiseMax(xbar - radius * p.scale);
  qp.ub.head(n) = p.ub.cwiseMin(xbar + radius * p.scale);

  VectorXd w0 = VectorXd::Zero(ntot);
  w0.head(n) = xbar;
  w0.segment(n, m) = (-cbar).cwiseMax(0.0);
  w0.segment(n + m, m) = cbar.cwiseMax(0.0);

  const QpResult r = solve_qp_from_feasible(qp, w0);
  return {r.x.head(n), r.eq_dual, r.status == QpStatus::Solved};
}

// Residual minimization used to classify stubborn subproblems: sigma is
// frozen at the iterate (it enters linearly for N = 1, so there it stays
// free), and the remaining least-squares problem in (z, u) is convex.
VectorXd restore_feasibility(const MpcInstance& inst, const Packed& p,
                             const VectorXd& xbar) {
  const int n = inst.num_vars();
  const int m = 2 * inst.N;
  const bool sigma_free = inst.N == 1;

  MatrixXd M = MatrixXd::Zero(m, n);
  VectorXd r = VectorXd::Zero(m);
  for (int k = 0; k < inst.N; ++k) {
    M(2 * k, zx_at(k)) = 1.0;
    M(2 * k, ux_at(k)) = 1.0;
    M(2 * k + 1, zy_at(k)) = 1.0;
    M(2 * k + 1, uy_at(k)) = 1.0;
    if (k == 0) {
      if (sigma_free) {
        M(0, sg_at(0)) = -inst.z0.x();
        M(1, sg_at(0)) = -inst.z0.y();
      } else {
        r[0] = xbar[sg_at(0)] * inst.z0.x();
        r[1] = xbar[sg_at(0)] * inst.z0.y();
      }
    } else {
      M(2 * k, zx_at(k - 1)) = -xbar[sg_at(k)];
      M(2 * k + 1, zy_at(k - 1)) = -xbar[sg_at(k)];
    }
  }

  QpProblem qp;
  qp.H = 2.0 * M.transpose() * M;
  qp.H.diagonal().array() += 1e-12;
  qp.g = -2.0 * M.transpose() * r;
  qp.A = MatrixXd::Zero(0, n);
  qp.b = VectorXd::Zero(0);
  qp.lb = p.lb;
  qp.ub = p.ub;
  if (!sigma_free) {
    // Pin every sigma at the iterate.
    for (int k = 0; k < inst.N; ++k) {
      qp.lb[sg_at(k)] = xbar[sg_at(k)];
      qp.ub[sg_at(k)] = xbar[sg_at(k)];
    }
  }
  const QpResult res = solve_qp(qp, xbar);
  return res.x;
}

// Deterministic cold start: track the desired values, then for short
// horizons refine by scanning a coarse sigma grid with the exact fixed-sigma
// convex QP and keeping the cheapest feasible combination.
VectorXd cold_start(const MpcInstance& inst, const Packed& p,
                    const ScpSettings& settings) {
  const int n = inst.num_vars();
  VectorXd x(n);
  for (int k = 0; k < inst.N; ++k) {
    x[zx_at(k)] = inst.z_des[k].x();
    x[zy_at(k)] = inst.z_des[k].y();
    x[sg_at(k)] = inst.sigma_des;
    x[ux_at(k)] = inst.u_des[k].x();
    x[uy_at(k)] = inst.u_des[k].y();
  }
  x = clamp_to(x, p.lb, p.ub);
  if (inst.N > 2 || settings.cold_sigma_grid < 2) return x;

  const int gs = settings.cold_sigma_grid;
  std::vector<double> sigmas(gs);
  for (int i = 0; i < gs; ++i) {
    sigmas[i] = inst.sigma_lo +
                (inst.sigma_hi - inst.sigma_lo) * i / double(gs - 1);
  }

  double best_cost = kInf;
  VectorXd best = x;
  std::vector<int> idx(inst.N, 0);
  const int combos = static_cast<int>(std::pow(gs, inst.N));
  for (int c = 0; c < combos; ++c) {
    int rem = c;
    for (int k = 0; k < inst.N; ++k) {
      idx[k] = rem % gs;
      rem /= gs;
    }
    // Fixed-sigma convex QP in (z, u).
    QpProblem qp;
    qp.H = MatrixXd(p.h_diag.asDiagonal());
    qp.g = p.g;
    qp.lb = p.lb;
    qp.ub = p.ub;
    qp.A = MatrixXd::Zero(2 * inst.N, n);
    qp.b = VectorXd::Zero(2 * inst.N);
    for (int k = 0; k < inst.N; ++k) {
      const double s = sigmas[idx[k]];
      qp.lb[sg_at(k)] = s;
      qp.ub[sg_at(k)] = s;
      qp.A(2 * k, zx_at(k)) = 1.0;
      qp.A(2 * k, ux_at(k)) = 1.0;
      qp.A(2 * k + 1, zy_at(k)) = 1.0;
      qp.A(2 * k + 1, uy_at(k)) = 1.0;
      if (k == 0) {
        qp.b[0] = s * inst.z0.x();
        qp.b[1] = s * inst.z0.y();
      } else {
        qp.A(2 * k, zx_at(k - 1)) = -s;
        qp.A(2 * k + 1, zy_at(k - 1)) = -s;
      }
    }
    const QpResult res = solve_qp(qp, x);
    if (res.status != QpStatus::Solved ||
        res.eq_residual > settings.feasibility_tol) {
      continue;
    }
    const double f = true_cost(inst, res.x);
    if (f < best_cost - 1e-12) {
      best_cost = f;
      best = res.x;
    }
  }
  return best;
}

PlanSolution unpack(const MpcInstance& inst, const VectorXd& x,
                    PlanDiagnostics diag) {
  PlanSolution sol;
  sol.z.resize(inst.N);
  sol.sigma.resize(inst.N);
  sol.u.resize(inst.N);
  for (int k = 0; k < inst.N; ++k) {
    sol.z[k] = DcmVec(x[zx_at(k)], x[zy_at(k)]);
    sol.sigma[k] = x[sg_at(k)];
    sol.u[k] = DcmVec(x[ux_at(k)], x[uy_at(k)]);
  }
  sol.diagnostics = std::move(diag);
  return sol;
}

}  // namespace

PlanSolution solve_bilinear(const MpcInstance& inst, const WarmStart& warm,
                            const ScpSettings& settings) {
  inst.validate();
  const Packed p = pack_problem(inst);
  const int n = inst.num_vars();

  VectorXd x(n);
  if (!warm.empty() && static_cast<int>(warm.sigma.size()) >= inst.N) {
    for (int k = 0; k < inst.N; ++k) {
      x[zx_at(k)] = warm.z[k].x();
      x[zy_at(k)] = warm.z[k].y();
      x[sg_at(k)] = warm.sigma[k];
      x[ux_at(k)] = warm.u[k].x();
      x[uy_at(k)] = warm.u[k].y();
    }
    x = clamp_to(x, p.lb, p.ub);
  } else {
    x = cold_start(inst, p, settings);
  }

  const double cost_scale = 1.0 + p.g.lpNorm<Eigen::Infinity>();
  double mu = settings.penalty_init > 0.0 ? settings.penalty_init
                                          : 10.0 * cost_scale;
  const double mu_max = settings.penalty_max > 0.0
                            ? settings.penalty_max
                            : std::max(1e12, 1e6 * cost_scale);

  double radius = settings.trust_region_init;
  PlanDiagnostics diag;
  diag.status = PlanStatus::Degraded;

  VectorXd c = constraint_eval(inst, x);
  double merit = true_cost(inst, x) + mu * c.lpNorm<1>();
  diag.merit_history.emplace_back(mu, merit);

  int outer = 0;
  bool converged = false;
  for (; outer < settings.max_outer_iters; ++outer) {
    const MatrixXd J = constraint_jacobian(inst, x);

    SubproblemOut sub;
    for (int bump = 0; bump < 6; ++bump) {
      sub = solve_subproblem(inst, p, x, c, J, mu, radius);
      const double need =
          sub.eq_dual.size() > 0
              ? 1.5 * sub.eq_dual.lpNorm<Eigen::Infinity>()
              : 0.0;
      if (mu >= need || mu >= mu_max) break;
      mu = std::min(std::max(2.0 * mu, need), mu_max);
      merit = true_cost(inst, x) + mu * c.lpNorm<1>();
    }

    const VectorXd c_lin = c + J * (sub.x - x);
    const double f_new = true_cost(inst, sub.x);
    const double model = f_new + mu * c_lin.lpNorm<1>();
    const double pred = merit - model;

    if (pred <= 1e-14 * (1.0 + std::abs(merit))) {
      // The exact-cost model cannot improve the merit inside any smaller
      // region: x is a stationary point of the penalty function.
      converged = c.lpNorm<Eigen::Infinity>() <= settings.feasibility_tol;
      ++outer;
      break;
    }

    const VectorXd c_new = constraint_eval(inst, sub.x);
    const double merit_new = f_new + mu * c_new.lpNorm<1>();
    const double actual = merit - merit_new;
    const double rho = actual / pred;

    if (rho >= 0.1) {
      const double step = ((sub.x - x).cwiseQuotient(p.scale))
                              .lpNorm<Eigen::Infinity>();
      x = sub.x;
      c = c_new;
      merit = merit_new;
      diag.merit_history.emplace_back(mu, merit);
      if (rho >= 0.7 && step >= 0.999 * radius) {
        radius = std::min(radius * settings.trust_expand, 10.0);
      }
      if (c.lpNorm<Eigen::Infinity>() <= settings.feasibility_tol &&
          actual <= settings.cost_tol * (1.0 + std::abs(merit))) {
        converged = true;
        ++outer;
        break;
      }
    } else {
      radius *= settings.trust_shrink;
      if (radius < 1e-9) {
        ++outer;
        break;
      }
    }
  }

  diag.iterations = outer;
  diag.feasibility_residual = c.lpNorm<Eigen::Infinity>();
  diag.total_cost = true_cost(inst, x);

  if (converged && diag.feasibility_residual <= settings.feasibility_tol) {
    diag.status = PlanStatus::Solved;
    return unpack(inst, x, std::move(diag));
  }
  if (diag.feasibility_residual <= settings.feasibility_tol) {
    diag.status = PlanStatus::Degraded;
    return unpack(inst, x, std::move(diag));
  }

  const VectorXd xr = restore_feasibility(inst, p, x);
  const double resid_r =
      constraint_eval(inst, xr).lpNorm<Eigen::Infinity>();
  if (resid_r > settings.restoration_tol) {
    diag.status = PlanStatus::Infeasible;
    diag.feasibility_residual = std::min(resid_r, diag.feasibility_residual);
    return unpack(inst, x, std::move(diag));
  }
  if (resid_r < diag.feasibility_residual) {
    diag.feasibility_residual = resid_r;
    diag.total_cost = true_cost(inst, xr);
    diag.status = PlanStatus::Degraded;
    return unpack(inst, xr, std::move(diag));
  }
  diag.status = PlanStatus::Degraded;
  return unpack(inst, x, std::move(diag));
}

}  // namespace alipmpc
