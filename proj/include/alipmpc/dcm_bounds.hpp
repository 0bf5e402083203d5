#pragma once

#include <cstddef>
#include <vector>

#include "alipmpc/types.hpp"

namespace alipmpc {

/// Viability box of the initial DCM implied by the mechanical limits:
///   z_x_max   = L_max / (e^{lambda T_min} - 1)
///   z_yl_min  = w_l/(e^{lambda T_min}+1)
///               + (-W_l_max + W_l_min e^{lambda T_min}) / (e^{2 lambda T_min}-1)
///   z_yl_max  = same with W_l_min and W_l_max swapped.
/// The x box is symmetric and the right-swing y box mirrors the left one.
DcmBounds compute_dcm_bounds(const GaitLimits& limits, const ModelParams& p);

struct BoundednessViolation {
  DcmVec z = DcmVec::Zero();
  SwingSide side = SwingSide::LeftSwing;
  double margin = 0.0;  // negative: best reachable image misses the box
};

struct BoundednessReport {
  std::vector<BoundednessViolation> violations;
  double worst_margin = 0.0;       // min over grid of the best image clearance
  std::size_t checked = 0;         // grid points examined
  bool contraction_ok = true;      // interior z_x can always shrink in one step
  double worst_contraction = 0.0;  // max over interior z of |z_x'| / |z_x|
  bool ok() const { return violations.empty(); }
};

struct BoundednessOptions {
  bool parallel = true;   // OpenMP over grid rows; results are identical
  int duration_grid = 0;  // 0: same as grid_density
};

/// Grid check of the boundedness claim: every z inside `bounds` must admit a
/// step (u, T) inside `limits` whose reset-map image lands back inside the
/// (side-flipped) bounds. For each (z, T) the reachable image set is the
/// interval sigma*z - [u_max, u_min] per axis, so feasibility is an exact
/// interval intersection; T is gridded. Also certifies the forward-walking
/// contraction claim: every interior z admits a step whose image has a
/// strictly smaller |z_x| (the lateral channel alternates sides and only
/// contracts over a full two-step cycle, so it is covered by the margin).
BoundednessReport verify_boundedness(const DcmBounds& bounds,
                                     const GaitLimits& limits,
                                     const ModelParams& p,
                                     std::size_t grid_density,
                                     const BoundednessOptions& opts = {});

/// Brute-force reference: grids u as well as T and applies reset_map to every
/// candidate. Much slower; kept as the independent check of the interval
/// kernel and as the serial baseline for the benchmark.
BoundednessReport verify_boundedness_bruteforce(const DcmBounds& bounds,
                                                const GaitLimits& limits,
                                                const ModelParams& p,
                                                std::size_t grid_density);

}  // namespace alipmpc
