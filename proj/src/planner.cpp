#include "alipmpc/planner.hpp"

#include <cmath>

#include "alipmpc/alip_model.hpp"
#include "alipmpc/qp_solver.hpp"

namespace alipmpc {

void PlannerConfig::validate() const {
  if (N < 1) throw ConfigError("PlannerConfig: N must be >= 1");
  for (double a : alpha) {
    if (a < 0.0) throw ConfigError("PlannerConfig: negative weight");
  }
  limits.validate();
  if (!(replan_period > 0.0) || replan_period >= limits.T_min) {
    throw ConfigError("PlannerConfig: replan_period must lie in (0, T_min)");
  }
}

double PlannerConfig::beta(int k, int n_eff) const {
  return std::pow(beta_base, n_eff - k);
}

PlannerConfig PlannerConfig::make_default(const ModelParams& p) {
  PlannerConfig cfg;
  cfg.dcm_bounds = compute_dcm_bounds(cfg.limits, p);
  return cfg;
}

DcmVec estimate_initial_dcm(const DcmVec& xi_measured, double t_elapsed,
                            const ModelParams& p) {
  return xi_measured * std::exp(-p.lambda * t_elapsed);
}

DesiredValues build_desired_values(const PlannerInput& input,
                                   const PlannerConfig& cfg,
                                   const ModelParams& p) {
  if (input.upcoming_stones.empty()) {
    throw InsufficientTerrain("no upcoming stones to plan against");
  }
  const int n_eff =
      std::min<int>(cfg.N, static_cast<int>(input.upcoming_stones.size()));

  DesiredValues des;
  des.N = n_eff;
  des.sigma_des = std::exp(p.lambda * cfg.T_des);
  des.u_des.resize(n_eff);
  des.z_des.resize(n_eff);
  des.u_lo.resize(n_eff);
  des.u_hi.resize(n_eff);
  des.step_side.resize(n_eff);

  const PlanSolution* prev = nullptr;
  if (input.previous_solution && input.previous_solution->usable()) {
    prev = &*input.previous_solution;
  }

  Vec2 expected = input.contact_pos_world;  // expected contact before step k
  Vec2 prev_sum = input.contact_pos_world;  // contact + sum of planned steps
  for (int k = 0; k < n_eff; ++k) {
    const Stone& stone = input.upcoming_stones[k];
    des.step_side[k] =
        k % 2 == 0 ? input.swing_side : other_side(input.swing_side);
    des.u_des[k] = stone.center_world - expected;
    des.u_lo[k] = des.u_des[k] - stone.half_extent;
    des.u_hi[k] = des.u_des[k] + stone.half_extent;

    const double W =
        des.u_des[k].y() - cfg.limits.w(des.step_side[k]);
    des.z_des[k] =
        nominal_initial_dcm(des.u_des[k].x(), W, cfg.T_des,
                            other_side(des.step_side[k]), p, cfg.limits);

    // Expected world contact after step k: previous plan when available,
    // otherwise the stone itself.
    if (prev && k < prev->horizon()) {
      prev_sum += prev->u[k];
      expected = prev_sum;
    } else {
      expected = stone.center_world;
      prev_sum = stone.center_world;
    }
  }
  return des;
}

MpcInstance make_instance(const DesiredValues& des, const DcmVec& z0,
                          const PlannerConfig& cfg, const ModelParams& p) {
  MpcInstance inst;
  inst.N = des.N;
  inst.z0 = z0;
  inst.sigma_lo = std::exp(p.lambda * cfg.limits.T_min);
  inst.sigma_hi = std::exp(p.lambda * cfg.limits.T_max);
  inst.sigma_des = des.sigma_des;
  inst.alpha = cfg.alpha;
  inst.beta.resize(des.N);
  inst.z_des = des.z_des;
  inst.u_des = des.u_des;
  inst.u_lo = des.u_lo;
  inst.u_hi = des.u_hi;
  inst.z_lo.resize(des.N);
  inst.z_hi.resize(des.N);
  for (int k = 0; k < des.N; ++k) {
    inst.beta[k] = cfg.beta(k + 1, des.N);
    // z^k is the initial DCM of horizon step k+2, so its y box follows the
    // side of the *next* swing foot.
    const Vec2 ybox = cfg.dcm_bounds.y_box(other_side(des.step_side[k]));
    inst.z_lo[k] = DcmVec(cfg.dcm_bounds.z_x_min(), ybox.x());
    inst.z_hi[k] = DcmVec(cfg.dcm_bounds.z_x_max, ybox.y());
  }
  inst.validate();
  return inst;
}

namespace {

WarmStart warm_from_previous(const PlanSolution& prev, const MpcInstance& inst) {
  WarmStart w;
  w.z.resize(inst.N);
  w.sigma.resize(inst.N);
  w.u.resize(inst.N);
  for (int k = 0; k < inst.N; ++k) {
    if (k < prev.horizon()) {
      w.z[k] = prev.z[k];
      w.sigma[k] = prev.sigma[k];
      w.u[k] = prev.u[k];
    } else {
      w.z[k] = inst.z_des[k];
      w.sigma[k] = inst.sigma_des;
      w.u[k] = inst.u_des[k];
    }
  }
  return w;
}

PlanSolution solve_single_step_qp(const MpcInstance& inst,
                                  const WarmStart& warm) {
  // Variables (z_x, z_y, sigma, u_x, u_y); z^0 is data, so the dynamics rows
  // are linear and the whole problem is one convex QP.
  QpProblem qp;
  qp.H = Eigen::MatrixXd::Zero(5, 5);
  qp.g = Eigen::VectorXd::Zero(5);
  const double b = inst.beta[0];
  const double des[5] = {inst.z_des[0].x(), inst.z_des[0].y(), inst.sigma_des,
                         inst.u_des[0].x(), inst.u_des[0].y()};
  for (int j = 0; j < 5; ++j) {
    qp.H(j, j) = 2.0 * b * inst.alpha[j];
    qp.g[j] = -2.0 * b * inst.alpha[j] * des[j];
  }
  qp.A = Eigen::MatrixXd::Zero(2, 5);
  qp.A(0, 0) = 1.0;
  qp.A(0, 2) = -inst.z0.x();
  qp.A(0, 3) = 1.0;
  qp.A(1, 1) = 1.0;
  qp.A(1, 2) = -inst.z0.y();
  qp.A(1, 4) = 1.0;
  qp.b = Eigen::VectorXd::Zero(2);
  qp.lb = Eigen::VectorXd(5);
  qp.ub = Eigen::VectorXd(5);
  qp.lb << inst.z_lo[0].x(), inst.z_lo[0].y(), inst.sigma_lo,
      inst.u_lo[0].x(), inst.u_lo[0].y();
  qp.ub << inst.z_hi[0].x(), inst.z_hi[0].y(), inst.sigma_hi,
      inst.u_hi[0].x(), inst.u_hi[0].y();

  Eigen::VectorXd x0(5);
  if (!warm.empty()) {
    x0 << warm.z[0].x(), warm.z[0].y(), warm.sigma[0], warm.u[0].x(),
        warm.u[0].y();
  } else {
    x0 << des[0], des[1], des[2], des[3], des[4];
  }
  const QpResult r = solve_qp(qp, x0);

  PlanSolution sol;
  sol.z = {DcmVec(r.x[0], r.x[1])};
  sol.sigma = {r.x[2]};
  sol.u = {DcmVec(r.x[3], r.x[4])};
  sol.diagnostics.iterations = r.iterations;
  sol.diagnostics.feasibility_residual = r.eq_residual;
  sol.diagnostics.total_cost =
      instance_cost(inst, sol.z, sol.sigma, sol.u);
  switch (r.status) {
    case QpStatus::Solved:
      sol.diagnostics.status = PlanStatus::Solved;
      break;
    case QpStatus::Infeasible:
      sol.diagnostics.status = PlanStatus::Infeasible;
      break;
    default:
      sol.diagnostics.status = PlanStatus::Degraded;
      break;
  }
  return sol;
}

}  // namespace

PlanSolution plan(const PlannerInput& input, const PlannerConfig& cfg,
                  const ModelParams& p) {
  cfg.validate();
  if (!(input.t_elapsed >= 0.0) || input.t_elapsed > 10.0 * cfg.limits.T_max) {
    throw ConfigError("PlannerInput: t_elapsed out of range");
  }
  const DesiredValues des = build_desired_values(input, cfg, p);
  const DcmVec z0 = estimate_initial_dcm(input.xi_measured, input.t_elapsed, p);
  const MpcInstance inst = make_instance(des, z0, cfg, p);

  WarmStart warm;
  if (input.previous_solution && input.previous_solution->usable()) {
    warm = warm_from_previous(*input.previous_solution, inst);
  }
  if (inst.N == 1) return solve_single_step_qp(inst, warm);
  return solve_bilinear(inst, warm, cfg.scp);
}

Footstep commit_step(const PlanSolution& sol, SwingSide side,
                     const ModelParams& p) {
  if (sol.horizon() < 1 || sol.diagnostics.status == PlanStatus::Infeasible) {
    throw std::logic_error("commit_step on an unusable solution");
  }
  Footstep step;
  step.u = sol.u[0];
  step.T = std::log(sol.sigma[0]) / p.lambda;
  step.side = side;
  return step;
}

PlanSolution shift_for_touchdown(const PlanSolution& sol) {
  PlanSolution out = sol;
  if (out.horizon() <= 1) {
    out.z.clear();
    out.sigma.clear();
    out.u.clear();
    return out;
  }
  out.z.erase(out.z.begin());
  out.sigma.erase(out.sigma.begin());
  out.u.erase(out.u.begin());
  return out;
}

}  // namespace alipmpc
