#pragma once

#include "alipmpc/mpc_instance.hpp"

namespace alipmpc {

/// Knobs of the sequential-convexification solve. Penalty parameters default
/// to values derived from the instance's cost scale when left at 0.
struct ScpSettings {
  int max_outer_iters = 30;
  double trust_region_init = 0.2;  // in scaled variables (sigma / sigma_des)
  double trust_shrink = 0.5;
  double trust_expand = 1.5;
  double feasibility_tol = 1e-6;
  double cost_tol = 1e-8;
  double restoration_tol = 1e-3;  // residual above this means infeasible
  double penalty_init = 0.0;
  double penalty_max = 0.0;
  int cold_sigma_grid = 5;  // sigma seeding for cold starts with N <= 2
};

/// Trust-region sequential convexification of the bilinear stepping problem.
/// Each outer iteration linearizes sigma^k z^{k-1} about the iterate, solves
/// the resulting convex QP with L1-elastic dynamics inside a box trust
/// region, and accepts or rejects by exact-penalty merit decrease. The cost
/// is quadratic in the variables, so the only model error is in the
/// constraints. Deterministic for identical (instance, warm start, settings).
PlanSolution solve_bilinear(const MpcInstance& inst, const WarmStart& warm,
                            const ScpSettings& settings = {});

}  // namespace alipmpc
