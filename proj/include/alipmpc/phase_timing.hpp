#pragma once

#include <vector>

#include "alipmpc/types.hpp"

namespace alipmpc {

/// One linear piece of the phase variable: from (t_start, tau_start) the
/// phase ramps so it would hit 1 exactly at t = T_des.
struct PhaseSegment {
  double t_start = 0.0;
  double tau_start = 0.0;
  double T_des = 0.5;
};

/// Piecewise-linear swing-phase variable under mid-step duration updates.
/// One instance covers one swing episode; reset at every touchdown.
struct PhaseState {
  std::vector<PhaseSegment> segments;
};

struct PhaseValue {
  double tau = 0.0;
  double tau_dot = 0.0;
};

/// Fresh phase at touchdown with the committed duration.
PhaseState make_phase(double T_des);

/// Records a duration update at relative time t_now. The new segment starts
/// from the current phase value, keeping tau continuous. Throws
/// NonCausalDuration when new_T_des <= t_now.
PhaseState phase_update(const PhaseState& state, double t_now,
                        double new_T_des);

/// tau and tau_dot at relative time t; tau clamps to 1 (tau_dot 0) once the
/// active segment's T_des has passed.
PhaseValue phase_eval(const PhaseState& state, double t);

}  // namespace alipmpc
