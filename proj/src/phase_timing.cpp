#include "alipmpc/phase_timing.hpp"

#include <stdexcept>

namespace alipmpc {
namespace {

const PhaseSegment& active_segment(const PhaseState& state, double t) {
  if (state.segments.empty()) {
    throw std::logic_error("phase_eval on empty PhaseState");
  }
  // Segments are appended with strictly increasing t_start.
  const PhaseSegment* seg = &state.segments.front();
  for (const PhaseSegment& s : state.segments) {
    if (s.t_start <= t) seg = &s;
  }
  return *seg;
}

}  // namespace

PhaseState make_phase(double T_des) {
  if (!(T_des > 0.0)) throw NonCausalDuration("initial T_des must be > 0");
  return PhaseState{{PhaseSegment{0.0, 0.0, T_des}}};
}

PhaseState phase_update(const PhaseState& state, double t_now,
                        double new_T_des) {
  if (!(new_T_des > t_now)) {
    throw NonCausalDuration("duration update would place touchdown in the past");
  }
  if (state.segments.empty()) {
    if (t_now != 0.0) throw std::logic_error("first phase segment must start at t=0");
    return PhaseState{{PhaseSegment{0.0, 0.0, new_T_des}}};
  }
  if (t_now < state.segments.back().t_start) {
    throw std::logic_error("phase updates must arrive in time order");
  }
  const PhaseValue v = phase_eval(state, t_now);
  PhaseState out = state;
  if (t_now == out.segments.back().t_start) {
    out.segments.back() = PhaseSegment{t_now, v.tau, new_T_des};
  } else {
    out.segments.push_back(PhaseSegment{t_now, v.tau, new_T_des});
  }
  return out;
}

PhaseValue phase_eval(const PhaseState& state, double t) {
  const PhaseSegment& seg = active_segment(state, t);
  if (t >= seg.T_des) return {1.0, 0.0};
  const double slope = (1.0 - seg.tau_start) / (seg.T_des - seg.t_start);
  return {seg.tau_start + slope * (t - seg.t_start), slope};
}

}  // namespace alipmpc
