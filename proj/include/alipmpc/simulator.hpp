#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alipmpc/planner.hpp"
#include "alipmpc/rng.hpp"
#include "alipmpc/terrain.hpp"
#include "alipmpc/types.hpp"

namespace alipmpc {

/// Horizontal force pulse applied during one constrained step, expressed in
/// time relative to that step's touchdown.
struct Perturbation {
  int step_index = 1;          // 1-based over constrained steps
  Vec2 force = Vec2::Zero();   // N
  double t_start = 0.1;        // s
  double t_end = 0.2;          // s

  void validate(const GaitLimits& limits) const;
};

/// Forces of the standard perturbation scenario: +-150 N forward/backward at
/// steps 5 and 10, +-75 N lateral at steps 15 and 20, each for 0.1 s.
std::vector<Perturbation> default_perturbations();

enum class PlannerMode { Mpc, Qp };

struct ScenarioSpec {
  ProfileId profile = ProfileId::I;
  ProfileParams params;
  uint64_t seed = 1;
  std::vector<Perturbation> perturbations;
  std::optional<StoneProfile> imported;  // use these stones instead
};

struct RunInConfig {
  int steps = 6;
  /// Desired step length ramps linearly and saturates at this step, so the
  /// entry velocity matches the first stone pair.
  int ramp_full_at = 4;
  Vec2 half_extent = Vec2(0.5, 0.2);  // virtual foothold size
};

struct SimConfig {
  double tick = 0.001;
  double replan_period = 0.04;
  PlannerMode planner_mode = PlannerMode::Mpc;
  int horizon = 4;
  ModelParams model;
  PlannerConfig planner;
  ScenarioSpec scenario;
  double landing_noise = 0.0;  // uniform half-width on the realized step (m)
  int latency_ticks = 0;       // delay between solving and applying a plan
  double fall_multiplier = 3.0;
  RunInConfig run_in;

  void validate() const;
  static SimConfig make_default();
};

enum class TerminalKind { Completed, Fell, PlannerFailed };
const char* to_string(TerminalKind k);

struct TerminalStatus {
  TerminalKind kind = TerminalKind::Completed;
  int step = 0;      // constrained step index at the event (0 in run-in)
  double time = 0.0; // absolute sim time
};

struct TickRecord {
  double t = 0.0;
  int step = 0;              // overall step number, run-in included
  int constrained_step = 0;  // 0 while on the run-in
  AlipState state;
  DcmVec xi = DcmVec::Zero();
  double tau = 0.0, tau_dot = 0.0;
  Vec2 committed_u = Vec2::Zero();
  double committed_T = 0.0;
  Vec2 contact_w = Vec2::Zero();
  PlanStatus plan_status = PlanStatus::Solved;
  double plan_residual = 0.0;
  int plan_iterations = 0;
  double plan_cost = 0.0;
};

struct StepRecord {
  int index = 0;             // overall step number
  int constrained_index = 0; // 1-based over stones, 0 for run-in
  Vec2 realized_world = Vec2::Zero();
  Vec2 target_center = Vec2::Zero();
  bool in_bounds = true;
  double duration = 0.0;     // realized
  DcmVec z_post = DcmVec::Zero();  // initial DCM right after the reset
  SwingSide side = SwingSide::LeftSwing;
};

struct SimTrace {
  std::vector<TickRecord> ticks;
  std::vector<StepRecord> steps;
  TerminalStatus terminal;
};

struct Metrics {
  double step_position_rmse = 0.0;  // constrained steps only
  double max_abs_z_x = 0.0, max_abs_z_y = 0.0;
  int falls = 0;
  int violation_count = 0;    // realized steps outside their foothold
  int planner_failures = 0;   // infeasible planner returns
  int completed_steps = 0;    // constrained touchdowns
  // Wall-clock planner stats; reported separately from the deterministic
  // outputs.
  int solve_count = 0;
  double solve_ms_median = 0.0, solve_ms_p99 = 0.0, solve_ms_max = 0.0;
};

struct SimResult {
  SimConfig config;
  StoneProfile profile;
  SimTrace trace;
  Metrics metrics;
};

SimResult run_scenario(const SimConfig& cfg);

/// Independent scenarios in parallel (one closed loop per worker). Outputs
/// are position-indexed and bit-identical to the serial run.
std::vector<SimResult> run_batch(const std::vector<SimConfig>& cfgs,
                                 bool parallel = true);

struct ComparisonRow {
  uint64_t seed = 0;
  TerminalStatus mpc_terminal, qp_terminal;
  double mpc_rmse = 0.0, qp_rmse = 0.0;
  double mpc_max_abs_z_x = 0.0, mpc_max_abs_z_y = 0.0;
};

struct ComparisonSummary {
  std::vector<ComparisonRow> rows;
  double mpc_completion_rate = 0.0, qp_completion_rate = 0.0;
};

/// Runs the MPC and one-step planners on identical scenarios per seed. The
/// run-in is always planned one step ahead with wide bounds, so both modes
/// reach the first stone in exactly the same state.
ComparisonSummary run_comparison(const SimConfig& base,
                                 const std::vector<uint64_t>& seeds,
                                 bool parallel = true);

struct TouchdownResult {
  AlipState state;
  Vec2 realized_world = Vec2::Zero();
};

/// Instantaneous support exchange: the contact frame translates to the
/// realized footstep (committed u plus landing noise), the CoM position is
/// re-expressed, and the angular momentum carries over unchanged. Two noise
/// draws are consumed per call regardless of the noise width.
TouchdownResult detect_touchdown_and_reset(const AlipState& state,
                                           const Footstep& committed,
                                           const Vec2& contact_w,
                                           double noise_half_width,
                                           Xoshiro256pp& rng);

Metrics compute_metrics(const SimTrace& trace, const StoneProfile& profile);

}  // namespace alipmpc
