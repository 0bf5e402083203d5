#pragma once

// Random but feasible-by-construction planning instances shared by the unit
// and acceptance suites. A feasible chain (sigma^k, u^k, z^k) is sampled
// first and the boxes are then placed around it, so every instance admits at
// least one point satisfying all hard constraints.

#include <cmath>

#include "alipmpc/mpc_instance.hpp"
#include "alipmpc/rng.hpp"
#include "alipmpc/types.hpp"

namespace alipmpc::test {

struct GenBase {
  ModelParams p = ModelParams::make(46.0, 0.9, 9.81);
  GaitLimits limits;
};

inline MpcInstance random_feasible_instance(int N, Xoshiro256pp& rng) {
  const GenBase base;
  const double lam = base.p.lambda;
  MpcInstance inst;
  inst.N = N;
  inst.sigma_lo = std::exp(lam * base.limits.T_min);
  inst.sigma_hi = std::exp(lam * base.limits.T_max);
  inst.sigma_des = std::exp(lam * 0.5);
  inst.alpha = {1e4, 2e4, 1.0, 1e4, 2e4};
  inst.beta.resize(N);
  for (int k = 0; k < N; ++k) {
    inst.beta[k] = std::pow(10.0, N - (k + 1));
  }
  inst.z0 = DcmVec(rng.uniform(-0.2, 0.2), rng.uniform(-0.15, 0.15));

  DcmVec z_prev = inst.z0;
  double side = rng.uniform01() < 0.5 ? 1.0 : -1.0;
  for (int k = 0; k < N; ++k) {
    const double sigma = rng.uniform(inst.sigma_lo, inst.sigma_hi);
    const DcmVec u(rng.uniform(0.0, 0.45),
                   side * 0.28 + rng.uniform(-0.15, 0.15));
    const DcmVec z = sigma * z_prev - u;

    const DcmVec u_half(rng.uniform(0.05, 0.2), rng.uniform(0.03, 0.12));
    const DcmVec z_half(rng.uniform(0.02, 0.3), rng.uniform(0.02, 0.3));
    inst.u_lo.push_back(u - u_half);
    inst.u_hi.push_back(u + u_half);
    inst.z_lo.push_back(z - z_half);
    inst.z_hi.push_back(z + z_half);
    inst.u_des.push_back(u + DcmVec(rng.uniform(-0.1, 0.1),
                                    rng.uniform(-0.05, 0.05)));
    inst.z_des.push_back(z + DcmVec(rng.uniform(-0.05, 0.05),
                                    rng.uniform(-0.05, 0.05)));
    z_prev = z;
    side = -side;
  }
  inst.validate();
  return inst;
}

}  // namespace alipmpc::test
