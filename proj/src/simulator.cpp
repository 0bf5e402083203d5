#include "alipmpc/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

#include "alipmpc/alip_model.hpp"
#include "alipmpc/phase_timing.hpp"

namespace alipmpc {

namespace {

constexpr uint64_t kNoiseSeedSalt = 0xd1b54a32d192ed03ULL;
constexpr double kTimeEps = 1e-12;

struct Target {
  Stone stone;
  bool constrained = false;
  int stone_index = -1;  // 0-based into the profile
};

SwingSide runin_side(int j, int steps, SwingSide first_side) {
  // The step after the run-in swings first_side; alternate backwards.
  return (steps - j) % 2 == 0 ? other_side(first_side) : first_side;
}

std::vector<double> runin_lengths(double distance, const RunInConfig& rc) {
  std::vector<double> pattern(rc.steps);
  double sum = 0.0;
  for (int j = 1; j <= rc.steps; ++j) {
    pattern[j - 1] = std::min(1.0, static_cast<double>(j) / rc.ramp_full_at);
    sum += pattern[j - 1];
  }
  for (double& v : pattern) v *= distance / sum;
  return pattern;
}

std::vector<Target> build_targets(const StoneProfile& profile,
                                  const RunInConfig& rc,
                                  const GaitLimits& limits) {
  std::vector<Target> targets;
  const double w_half = 0.5 * limits.w_l;
  const SwingSide last_side = other_side(profile.first_side);
  const double y_mid = profile.anchor.y() -
                       (last_side == SwingSide::LeftSwing ? w_half : -w_half);
  const std::vector<double> lengths = runin_lengths(profile.anchor.x(), rc);

  double x = 0.0;
  for (int j = 1; j <= rc.steps; ++j) {
    x += lengths[j - 1];
    const SwingSide s = runin_side(j, rc.steps, profile.first_side);
    Target t;
    t.stone.center_world =
        Vec2(x, y_mid + (s == SwingSide::LeftSwing ? w_half : -w_half));
    t.stone.half_extent = rc.half_extent;
    targets.push_back(t);
  }
  for (std::size_t i = 0; i < profile.stones.size(); ++i) {
    Target t;
    t.stone = profile.stones[i];
    t.constrained = true;
    t.stone_index = static_cast<int>(i);
    targets.push_back(t);
  }
  return targets;
}

StoneProfile make_scenario_profile(const SimConfig& cfg) {
  if (cfg.scenario.imported) return *cfg.scenario.imported;
  const GaitLimits& limits = cfg.planner.limits;
  // First pass to learn the first stone spacing, then regenerate shifted so
  // the run-in ramp ends exactly at the anchor.
  StoneProfile probe = generate_profile(cfg.scenario.profile,
                                        cfg.scenario.params, cfg.scenario.seed,
                                        limits, Vec2::Zero());
  double pattern_sum = 0.0;
  for (int j = 1; j <= cfg.run_in.steps; ++j) {
    pattern_sum +=
        std::min(1.0, static_cast<double>(j) / cfg.run_in.ramp_full_at);
  }
  const double first_L = probe.stones.empty() ? 0.4 : probe.stones[0].center_world.x();
  const Vec2 anchor(pattern_sum * first_L, -0.5 * limits.w_l);
  return generate_profile(cfg.scenario.profile, cfg.scenario.params,
                          cfg.scenario.seed, limits, anchor);
}

// Flow over [t_rel, t_rel + dt), splitting at the force-window edges so each
// piece sees a constant force.
AlipState flow_with_window(AlipState s, double t_rel, double dt,
                           const std::optional<Vec2>& force, double w_lo,
                           double w_hi, const ModelParams& p) {
  double t = t_rel;
  double rem = dt;
  while (rem > kTimeEps) {
    double stop = t + rem;
    bool active = false;
    if (force) {
      if (t < w_lo - kTimeEps) {
        stop = std::min(stop, w_lo);
      } else if (t < w_hi - kTimeEps) {
        active = true;
        stop = std::min(stop, w_hi);
      }
    }
    s = flow_state(s, stop - t, p, active ? force : std::nullopt);
    rem -= stop - t;
    t = stop;
  }
  return s;
}

struct PendingPlan {
  int64_t apply_tick = 0;
  PlanSolution solution;
};

struct LoopState {
  AlipState state;
  Vec2 contact_w = Vec2::Zero();
  SwingSide swing = SwingSide::LeftSwing;
  double t_rel = 0.0;
  int step_number = 1;       // overall, 1-based
  std::size_t target_idx = 0;
  Footstep committed;
  PhaseState phase;
  std::optional<PlanSolution> warm;
  std::deque<PendingPlan> pending;
  double next_replan_rel = 0.0;
  bool last_attempt_infeasible = false;
  PlanStatus last_status = PlanStatus::Solved;
  double last_residual = 0.0;
  int last_iterations = 0;
  double last_cost = 0.0;
};

}  // namespace

void Perturbation::validate(const GaitLimits& limits) const {
  if (step_index < 1) throw ConfigError("Perturbation: step_index must be >= 1");
  if (!(0.0 <= t_start) || !(t_start < t_end) || !(t_end <= limits.T_min)) {
    throw ConfigError("Perturbation: window must satisfy 0 <= start < end <= T_min");
  }
}

std::vector<Perturbation> default_perturbations() {
  return {{5, Vec2(150.0, 0.0), 0.1, 0.2},
          {10, Vec2(-150.0, 0.0), 0.1, 0.2},
          {15, Vec2(0.0, 75.0), 0.1, 0.2},
          {20, Vec2(0.0, -75.0), 0.1, 0.2}};
}

const char* to_string(TerminalKind k) {
  switch (k) {
    case TerminalKind::Completed: return "completed";
    case TerminalKind::Fell: return "fell";
    case TerminalKind::PlannerFailed: return "planner_failed";
  }
  return "?";
}

void SimConfig::validate() const {
  if (!(tick > 0.0)) throw ConfigError("SimConfig: tick must be positive");
  const double ratio = replan_period / tick;
  if (std::abs(ratio - std::round(ratio)) > 1e-9) {
    throw ConfigError("SimConfig: replan_period must be a multiple of tick");
  }
  if (horizon < 1) throw ConfigError("SimConfig: horizon must be >= 1");
  if (latency_ticks < 0) throw ConfigError("SimConfig: negative latency");
  if (run_in.steps < 1 || run_in.steps > 20) {
    throw ConfigError("SimConfig: run_in.steps must be in [1, 20]");
  }
  if (!(fall_multiplier >= 1.0)) {
    throw ConfigError("SimConfig: fall_multiplier must be >= 1");
  }
  for (const Perturbation& pert : scenario.perturbations) {
    pert.validate(planner.limits);
  }
}

SimConfig SimConfig::make_default() {
  SimConfig cfg;
  cfg.model = ModelParams::make(46.0, 0.9, 9.81);
  cfg.planner = PlannerConfig::make_default(cfg.model);
  return cfg;
}

TouchdownResult detect_touchdown_and_reset(const AlipState& state,
                                           const Footstep& committed,
                                           const Vec2& contact_w,
                                           double noise_half_width,
                                           Xoshiro256pp& rng) {
  const double nx = (2.0 * rng.uniform01() - 1.0) * noise_half_width;
  const double ny = (2.0 * rng.uniform01() - 1.0) * noise_half_width;
  const Vec2 realized_u = committed.u + Vec2(nx, ny);

  TouchdownResult out;
  out.state = state;
  out.state.x_c -= realized_u.x();
  out.state.y_c -= realized_u.y();
  out.realized_world = contact_w + realized_u;
  return out;
}

SimResult run_scenario(const SimConfig& cfg_in) {
  SimConfig cfg = cfg_in;
  cfg.validate();
  const ModelParams& p = cfg.model;

  PlannerConfig pcfg = cfg.planner;
  pcfg.replan_period = cfg.replan_period;
  pcfg.dcm_bounds = compute_dcm_bounds(pcfg.limits, p);
  if (cfg.planner_mode == PlannerMode::Qp) {
    pcfg.N = 1;
  } else {
    pcfg.N = cfg.horizon;
  }
  pcfg.validate();

  SimResult result;
  result.profile = make_scenario_profile(cfg);
  result.config = cfg;

  const std::vector<Target> targets =
      build_targets(result.profile, cfg.run_in, pcfg.limits);
  const DcmBounds& bounds = pcfg.dcm_bounds;

  Xoshiro256pp noise_rng(cfg.scenario.seed ^ kNoiseSeedSalt);
  std::vector<double> solve_ms;

  LoopState ls;
  {
    const SwingSide s1 =
        runin_side(1, cfg.run_in.steps, result.profile.first_side);
    ls.swing = s1;
    const double w_half = 0.5 * pcfg.limits.w_l;
    const SwingSide last_side = other_side(result.profile.first_side);
    const double y_mid =
        result.profile.anchor.y() -
        (last_side == SwingSide::LeftSwing ? w_half : -w_half);
    const SwingSide stance = other_side(s1);
    ls.contact_w =
        Vec2(0.0, y_mid + (stance == SwingSide::LeftSwing ? w_half : -w_half));
    ls.state = AlipState{0.0, y_mid - ls.contact_w.y(), 0.0, 0.0};
  }

  SimTrace& trace = result.trace;
  bool done = false;

  auto current_target = [&]() -> const Target& { return targets[ls.target_idx]; };
  auto constrained_index = [&]() {
    const Target& t = current_target();
    return t.constrained ? t.stone_index + 1 : 0;
  };

  auto default_commit = [&]() {
    ls.committed.u = current_target().stone.center_world - ls.contact_w;
    ls.committed.T = pcfg.T_des;
    ls.committed.side = ls.swing;
    ls.phase = make_phase(ls.committed.T);
  };

  auto apply_solution = [&](const PlanSolution& sol) {
    Footstep step = commit_step(sol, ls.swing, p);
    step.T = std::max(step.T, ls.t_rel + cfg.replan_period);
    ls.phase = phase_update(ls.phase, ls.t_rel, step.T);
    ls.committed = step;
  };

  auto invoke_planner = [&]() {
    PlannerInput input;
    input.xi_measured = dcm_from_state(ls.state, p);
    input.t_elapsed = ls.t_rel;
    input.contact_pos_world = ls.contact_w;
    input.swing_side = ls.swing;
    const int horizon_now = current_target().constrained ? pcfg.N : 1;
    const std::size_t take = std::min<std::size_t>(
        horizon_now, targets.size() - ls.target_idx);
    input.upcoming_stones.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
      input.upcoming_stones.push_back(targets[ls.target_idx + i].stone);
    }
    input.previous_solution = ls.warm;

    PlannerConfig call_cfg = pcfg;
    call_cfg.N = horizon_now;

    const auto t0 = std::chrono::steady_clock::now();
    PlanSolution sol = plan(input, call_cfg, p);
    const auto t1 = std::chrono::steady_clock::now();
    solve_ms.push_back(
        std::chrono::duration<double, std::milli>(t1 - t0).count());

    ls.last_status = sol.diagnostics.status;
    ls.last_residual = sol.diagnostics.feasibility_residual;
    ls.last_iterations = sol.diagnostics.iterations;
    ls.last_cost = sol.diagnostics.total_cost;

    if (sol.diagnostics.status == PlanStatus::Infeasible) {
      ls.last_attempt_infeasible = true;
      return;  // hold the previous commitment and keep replanning
    }
    ls.last_attempt_infeasible = false;
    ls.warm = sol;
    if (cfg.latency_ticks == 0) {
      apply_solution(sol);
    } else {
      ls.pending.push_back(
          {static_cast<int64_t>(trace.ticks.size()) + cfg.latency_ticks,
           std::move(sol)});
    }
  };

  // Terminal handling shared by the touchdown path and the fall check.
  auto finish = [&](TerminalKind kind, double t_abs) {
    trace.terminal.kind = kind;
    trace.terminal.step = constrained_index();
    trace.terminal.time = t_abs;
    done = true;
  };

  default_commit();

  const double cap_time =
      (static_cast<double>(targets.size()) + 2.0) * (pcfg.limits.T_max + 0.1);
  const int64_t max_ticks = static_cast<int64_t>(cap_time / cfg.tick) + 16;

  for (int64_t tick_idx = 0; !done && tick_idx < max_ticks; ++tick_idx) {
    const double t_abs = static_cast<double>(tick_idx) * cfg.tick;

    // Apply plans whose latency expired, oldest first.
    while (!ls.pending.empty() && ls.pending.front().apply_tick <= tick_idx) {
      apply_solution(ls.pending.front().solution);
      ls.pending.pop_front();
    }

    if (ls.t_rel + kTimeEps >= ls.next_replan_rel) {
      invoke_planner();
      while (ls.next_replan_rel <= ls.t_rel + kTimeEps) {
        ls.next_replan_rel += cfg.replan_period;
      }
    }

    {
      TickRecord row;
      row.t = t_abs;
      row.step = ls.step_number;
      row.constrained_step = constrained_index();
      row.state = ls.state;
      row.xi = dcm_from_state(ls.state, p);
      const PhaseValue pv = phase_eval(ls.phase, ls.t_rel);
      row.tau = pv.tau;
      row.tau_dot = pv.tau_dot;
      row.committed_u = ls.committed.u;
      row.committed_T = ls.committed.T;
      row.contact_w = ls.contact_w;
      row.plan_status = ls.last_status;
      row.plan_residual = ls.last_residual;
      row.plan_iterations = ls.last_iterations;
      row.plan_cost = ls.last_cost;
      trace.ticks.push_back(row);
    }

    // Active perturbation window for the current step, if any.
    std::optional<Vec2> force;
    double w_lo = 0.0, w_hi = 0.0;
    for (const Perturbation& pert : cfg.scenario.perturbations) {
      if (pert.step_index == constrained_index()) {
        force = pert.force;
        w_lo = pert.t_start;
        w_hi = pert.t_end;
        break;
      }
    }

    double rem = cfg.tick;
    while (rem > kTimeEps && !done) {
      const double to_touchdown = ls.committed.T - ls.t_rel;
      if (to_touchdown <= rem + kTimeEps) {
        ls.state = flow_with_window(ls.state, ls.t_rel, to_touchdown, force,
                                    w_lo, w_hi, p);
        rem -= to_touchdown;
        const double td_time = t_abs + (cfg.tick - rem);

        const TouchdownResult td = detect_touchdown_and_reset(
            ls.state, ls.committed, ls.contact_w, cfg.landing_noise,
            noise_rng);

        StepRecord rec;
        rec.index = ls.step_number;
        rec.constrained_index = constrained_index();
        rec.realized_world = td.realized_world;
        rec.target_center = current_target().stone.center_world;
        rec.in_bounds =
            current_target().stone.contains(td.realized_world, 1e-9);
        rec.duration = ls.committed.T;
        rec.side = ls.swing;

        ls.state = td.state;
        ls.contact_w = td.realized_world;
        rec.z_post = dcm_from_state(ls.state, p);
        trace.steps.push_back(rec);

        if (ls.last_attempt_infeasible) {
          finish(TerminalKind::PlannerFailed, td_time);
          break;
        }
        if (ls.target_idx + 1 == targets.size()) {
          finish(TerminalKind::Completed, td_time);
          break;
        }

        ++ls.target_idx;
        ++ls.step_number;
        ls.swing = other_side(ls.swing);
        ls.t_rel = 0.0;
        ls.next_replan_rel = cfg.replan_period;
        ls.pending.clear();
        if (ls.warm) {
          ls.warm = shift_for_touchdown(*ls.warm);
          if (ls.warm->horizon() == 0) ls.warm.reset();
        }
        default_commit();

        // Perturbations never straddle a touchdown (t_end <= T_min), so the
        // window of the finished step is spent.
        force.reset();
        for (const Perturbation& pert : cfg.scenario.perturbations) {
          if (pert.step_index == constrained_index()) {
            force = pert.force;
            w_lo = pert.t_start;
            w_hi = pert.t_end;
            break;
          }
        }
        invoke_planner();  // step-start plan at the touchdown instant
      } else {
        ls.state =
            flow_with_window(ls.state, ls.t_rel, rem, force, w_lo, w_hi, p);
        ls.t_rel += rem;
        rem = 0.0;
      }
    }
    if (done) break;

    // Fall detection on the back-propagated initial DCM: within a step the
    // raw DCM legitimately grows by e^{lambda T}, so the viability measure
    // is its pullback to the touchdown instant.
    const DcmVec z_est = estimate_initial_dcm(dcm_from_state(ls.state, p),
                                              ls.t_rel, p);
    const Vec2 ybox = bounds.y_box(ls.swing);
    const double yc = 0.5 * (ybox.x() + ybox.y());
    const double yh = 0.5 * (ybox.y() - ybox.x());
    if (std::abs(z_est.x()) > cfg.fall_multiplier * bounds.z_x_max ||
        std::abs(z_est.y() - yc) > cfg.fall_multiplier * yh) {
      finish(TerminalKind::Fell, static_cast<double>(tick_idx + 1) * cfg.tick);
    }
  }

  if (!done) {
    // Wedged loop; report it as a planner failure at the current step.
    trace.terminal.kind = TerminalKind::PlannerFailed;
    trace.terminal.step = constrained_index();
    trace.terminal.time = static_cast<double>(max_ticks) * cfg.tick;
  }

  result.metrics = compute_metrics(trace, result.profile);
  if (!solve_ms.empty()) {
    std::vector<double> sorted = solve_ms;
    std::sort(sorted.begin(), sorted.end());
    result.metrics.solve_count = static_cast<int>(sorted.size());
    result.metrics.solve_ms_median = sorted[sorted.size() / 2];
    result.metrics.solve_ms_p99 =
        sorted[std::min(sorted.size() - 1,
                        static_cast<std::size_t>(0.99 * sorted.size()))];
    result.metrics.solve_ms_max = sorted.back();
  }
  return result;
}

Metrics compute_metrics(const SimTrace& trace, const StoneProfile& profile) {
  Metrics m;
  double sq_sum = 0.0;
  int n = 0;
  for (const StepRecord& rec : trace.steps) {
    if (rec.constrained_index == 0) continue;
    ++n;
    const int si = rec.constrained_index - 1;
    Vec2 center = rec.target_center;
    if (si >= 0 && si < static_cast<int>(profile.stones.size())) {
      center = profile.stones[si].center_world;
    }
    sq_sum += (rec.realized_world - center).squaredNorm();
    if (!rec.in_bounds) ++m.violation_count;
    m.max_abs_z_x = std::max(m.max_abs_z_x, std::abs(rec.z_post.x()));
    m.max_abs_z_y = std::max(m.max_abs_z_y, std::abs(rec.z_post.y()));
  }
  m.completed_steps = n;
  m.step_position_rmse = n > 0 ? std::sqrt(sq_sum / n) : 0.0;
  m.falls = trace.terminal.kind == TerminalKind::Fell ? 1 : 0;

  int infeasible_rows = 0;
  PlanStatus prev = PlanStatus::Solved;
  for (const TickRecord& row : trace.ticks) {
    if (row.plan_status == PlanStatus::Infeasible &&
        prev != PlanStatus::Infeasible) {
      ++infeasible_rows;
    }
    prev = row.plan_status;
  }
  m.planner_failures = infeasible_rows;
  return m;
}

std::vector<SimResult> run_batch(const std::vector<SimConfig>& cfgs,
                                 bool parallel) {
  std::vector<SimResult> results(cfgs.size());
  const int64_t n = static_cast<int64_t>(cfgs.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int64_t i = 0; i < n; ++i) {
    results[static_cast<std::size_t>(i)] =
        run_scenario(cfgs[static_cast<std::size_t>(i)]);
  }
  return results;
}

ComparisonSummary run_comparison(const SimConfig& base,
                                 const std::vector<uint64_t>& seeds,
                                 bool parallel) {
  if (seeds.empty()) throw ConfigError("run_comparison: need at least one seed");
  std::vector<SimConfig> cfgs;
  cfgs.reserve(2 * seeds.size());
  for (uint64_t seed : seeds) {
    SimConfig mpc = base;
    mpc.scenario.seed = seed;
    mpc.planner_mode = PlannerMode::Mpc;
    SimConfig qp = mpc;
    qp.planner_mode = PlannerMode::Qp;
    cfgs.push_back(mpc);
    cfgs.push_back(qp);
  }
  const std::vector<SimResult> results = run_batch(cfgs, parallel);

  ComparisonSummary summary;
  int mpc_done = 0, qp_done = 0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const SimResult& mpc = results[2 * i];
    const SimResult& qp = results[2 * i + 1];
    ComparisonRow row;
    row.seed = seeds[i];
    row.mpc_terminal = mpc.trace.terminal;
    row.qp_terminal = qp.trace.terminal;
    row.mpc_rmse = mpc.metrics.step_position_rmse;
    row.qp_rmse = qp.metrics.step_position_rmse;
    row.mpc_max_abs_z_x = mpc.metrics.max_abs_z_x;
    row.mpc_max_abs_z_y = mpc.metrics.max_abs_z_y;
    summary.rows.push_back(row);
    if (mpc.trace.terminal.kind == TerminalKind::Completed) ++mpc_done;
    if (qp.trace.terminal.kind == TerminalKind::Completed) ++qp_done;
  }
  summary.mpc_completion_rate = static_cast<double>(mpc_done) / seeds.size();
  summary.qp_completion_rate = static_cast<double>(qp_done) / seeds.size();
  return summary;
}

}  // namespace alipmpc
