#pragma once

#include <optional>

#include "alipmpc/types.hpp"

namespace alipmpc {

/// DCM of an ALIP state in the current contact frame:
///   xi = (x_c + L_y / (lambda m z0), y_c - L_x / (lambda m z0)).
DcmVec dcm_from_state(const AlipState& s, const ModelParams& p);

/// Exact flow of the pendulum dynamics for t >= 0. With `f_ext` set, a
/// constant horizontal force acts at CoM height for the whole interval
/// (L_y' += z0 Fx, L_x' -= z0 Fy), handled through the particular solution
/// of the shifted linear system, so the propagation stays closed-form.
AlipState flow_state(const AlipState& s0, double t, const ModelParams& p,
                     const std::optional<Vec2>& f_ext = std::nullopt);

/// xi(t) = xi0 * exp(lambda t) within a step.
DcmVec dcm_at_time(const DcmVec& xi0, double t, const ModelParams& p);

/// Step-to-step map of the initial DCM: z' = z * exp(lambda T) - u.
DcmVec reset_map(const DcmVec& z_prev, const Footstep& step,
                 const ModelParams& p);

/// Initial DCM of the periodic gait with constant step (L, w_side + W, T).
/// `side` is the swing foot of the step this DCM starts, which fixes the
/// sign of the width term.
DcmVec nominal_initial_dcm(double L, double W, double T, SwingSide side,
                           const ModelParams& p, const GaitLimits& limits);

/// Orbital energy of one axis of the linear pendulum; conserved along the
/// unforced flow. `pos` is x_c paired with L_y, or y_c paired with -L_x.
double orbital_energy(double pos, double momentum, const ModelParams& p);

}  // namespace alipmpc
