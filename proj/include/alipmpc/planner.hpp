#pragma once

#include <optional>
#include <vector>

#include "alipmpc/dcm_bounds.hpp"
#include "alipmpc/mpc_instance.hpp"
#include "alipmpc/scp_solver.hpp"
#include "alipmpc/terrain.hpp"
#include "alipmpc/types.hpp"

namespace alipmpc {

struct PlannerConfig {
  int N = 4;
  double T_des = 0.5;
  /// Weights on (z_x, z_y, sigma, u_x, u_y); the y entries are doubled
  /// because the foothold is half as wide in y.
  std::array<double, 5> alpha = {1e4, 2e4, 1.0, 1e4, 2e4};
  /// Per-step decay beta^k = beta_base^{N_eff - k}; 10 gives 10^{4-k} at the
  /// default horizon.
  double beta_base = 10.0;
  GaitLimits limits;
  DcmBounds dcm_bounds;  // fill with compute_dcm_bounds(limits, p)
  double replan_period = 0.04;
  ScpSettings scp;

  void validate() const;
  double beta(int k, int n_eff) const;

  static PlannerConfig make_default(const ModelParams& p);
};

struct PlannerInput {
  DcmVec xi_measured = DcmVec::Zero();
  double t_elapsed = 0.0;            // since last touchdown
  Vec2 contact_pos_world = Vec2::Zero();
  SwingSide swing_side = SwingSide::LeftSwing;
  /// Remaining footholds in walking order, world frame. The horizon shrinks
  /// to this length when fewer than N remain.
  std::vector<Stone> upcoming_stones;
  std::optional<PlanSolution> previous_solution;
};

/// Desired values and bounds of one planning instance, before the solver
/// sees them. step_side[k] is the swing foot of horizon step k+1.
struct DesiredValues {
  int N = 0;
  double sigma_des = 0.0;
  std::vector<DcmVec> u_des, z_des;
  std::vector<DcmVec> u_lo, u_hi;
  std::vector<SwingSide> step_side;
};

/// z^0 = xi_measured * exp(-lambda * t_elapsed), the initial DCM of the
/// running step recovered from the instantaneous measurement.
DcmVec estimate_initial_dcm(const DcmVec& xi_measured, double t_elapsed,
                            const ModelParams& p);

DesiredValues build_desired_values(const PlannerInput& input,
                                   const PlannerConfig& cfg,
                                   const ModelParams& p);

MpcInstance make_instance(const DesiredValues& des, const DcmVec& z0,
                          const PlannerConfig& cfg, const ModelParams& p);

/// One planning tick. For an effective horizon of 1 the bilinear term is
/// linear (z^0 is data), so the instance is solved directly as a single
/// convex QP; that path is the one-step baseline. Longer horizons go through
/// solve_bilinear with the previous solution as warm start.
PlanSolution plan(const PlannerInput& input, const PlannerConfig& cfg,
                  const ModelParams& p);

/// First step of a solution turned into the committed footstep
/// (u^1, T^1 = ln(sigma^1)/lambda).
Footstep commit_step(const PlanSolution& sol, SwingSide side,
                     const ModelParams& p);

/// Drops the executed first step so the remainder seeds the next step's
/// warm start; plan() pads the missing tail from the desired values.
PlanSolution shift_for_touchdown(const PlanSolution& sol);

}  // namespace alipmpc
