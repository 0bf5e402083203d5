#include "alipmpc/trace_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace alipmpc {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file: " + path);
  out << content;
}

nlohmann::json metrics_json(const Metrics& m) {
  return {{"step_position_rmse", m.step_position_rmse},
          {"max_abs_z_x", m.max_abs_z_x},
          {"max_abs_z_y", m.max_abs_z_y},
          {"falls", m.falls},
          {"violation_count", m.violation_count},
          {"planner_failures", m.planner_failures},
          {"completed_steps", m.completed_steps}};
}

nlohmann::json terminal_json(const TerminalStatus& t) {
  return {{"kind", to_string(t.kind)}, {"step", t.step}, {"time", t.time}};
}

}  // namespace

std::string trace_to_tsv(const SimTrace& trace) {
  std::string out;
  out.reserve(trace.ticks.size() * 160);
  out +=
      "# t\tstep\tconstrained_step\tx_c\ty_c\tL_x\tL_y\txi_x\txi_y\ttau\t"
      "tau_dot\tu_x\tu_y\tT\tcontact_x\tcontact_y\tplan_status\t"
      "plan_residual\tplan_iterations\tplan_cost\n";
  for (const TickRecord& r : trace.ticks) {
    out += fmt(r.t);
    out += '\t';
    out += std::to_string(r.step);
    out += '\t';
    out += std::to_string(r.constrained_step);
    for (double v : {r.state.x_c, r.state.y_c, r.state.L_x, r.state.L_y,
                     r.xi.x(), r.xi.y(), r.tau, r.tau_dot, r.committed_u.x(),
                     r.committed_u.y(), r.committed_T, r.contact_w.x(),
                     r.contact_w.y()}) {
      out += '\t';
      out += fmt(v);
    }
    out += '\t';
    out += to_string(r.plan_status);
    out += '\t';
    out += fmt(r.plan_residual);
    out += '\t';
    out += std::to_string(r.plan_iterations);
    out += '\t';
    out += fmt(r.plan_cost);
    out += '\n';
  }
  return out;
}

std::string steps_to_tsv(const SimTrace& trace) {
  std::string out;
  out +=
      "# step\tconstrained_step\trealized_x\trealized_y\ttarget_x\ttarget_y\t"
      "in_bounds\tduration\tz_x\tz_y\tside\n";
  for (const StepRecord& r : trace.steps) {
    out += std::to_string(r.index);
    out += '\t';
    out += std::to_string(r.constrained_index);
    for (double v : {r.realized_world.x(), r.realized_world.y(),
                     r.target_center.x(), r.target_center.y()}) {
      out += '\t';
      out += fmt(v);
    }
    out += '\t';
    out += r.in_bounds ? '1' : '0';
    out += '\t';
    out += fmt(r.duration);
    out += '\t';
    out += fmt(r.z_post.x());
    out += '\t';
    out += fmt(r.z_post.y());
    out += '\t';
    out += to_string(r.side);
    out += '\n';
  }
  return out;
}

std::string summary_to_json(const SimResult& result) {
  nlohmann::json j;
  j["terminal"] = terminal_json(result.trace.terminal);
  j["metrics"] = metrics_json(result.metrics);
  j["scenario"] = {
      {"profile", to_string(result.config.scenario.profile)},
      {"seed", result.config.scenario.seed},
      {"planner",
       result.config.planner_mode == PlannerMode::Mpc ? "mpc" : "qp"},
      {"horizon", result.config.horizon},
      {"L", {result.config.scenario.params.L.lo,
             result.config.scenario.params.L.hi}},
      {"W", {result.config.scenario.params.W.lo,
             result.config.scenario.params.W.hi}},
      {"landing_noise", result.config.landing_noise},
      {"latency_ticks", result.config.latency_ticks},
      {"stones", result.profile.stones.size()}};
  return j.dump(2) + "\n";
}

std::string timing_to_json(const Metrics& m) {
  nlohmann::json j;
  j["solve_count"] = m.solve_count;
  j["solve_ms_median"] = m.solve_ms_median;
  j["solve_ms_p99"] = m.solve_ms_p99;
  j["solve_ms_max"] = m.solve_ms_max;
  return j.dump(2) + "\n";
}

std::string comparison_to_json(const ComparisonSummary& s) {
  nlohmann::json j;
  j["mpc_completion_rate"] = s.mpc_completion_rate;
  j["qp_completion_rate"] = s.qp_completion_rate;
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const ComparisonRow& r : s.rows) {
    rows.push_back({{"seed", r.seed},
                    {"mpc", terminal_json(r.mpc_terminal)},
                    {"qp", terminal_json(r.qp_terminal)},
                    {"mpc_rmse", r.mpc_rmse},
                    {"qp_rmse", r.qp_rmse},
                    {"mpc_max_abs_z_x", r.mpc_max_abs_z_x},
                    {"mpc_max_abs_z_y", r.mpc_max_abs_z_y}});
  }
  return j.dump(2) + "\n";
}

std::string comparison_to_text(const ComparisonSummary& s) {
  std::string out = "seed\tmpc_status\tmpc_rmse\tqp_status\tqp_rmse\n";
  for (const ComparisonRow& r : s.rows) {
    out += std::to_string(r.seed);
    out += '\t';
    out += to_string(r.mpc_terminal.kind);
    out += '\t';
    out += fmt(r.mpc_rmse);
    out += '\t';
    out += to_string(r.qp_terminal.kind);
    out += '\t';
    out += fmt(r.qp_rmse);
    out += '\n';
  }
  out += "mpc completion rate: " + fmt(s.mpc_completion_rate) + "\n";
  out += "qp completion rate: " + fmt(s.qp_completion_rate) + "\n";
  return out;
}

void write_run_outputs(const SimResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir + "/trace.tsv", trace_to_tsv(result.trace));
  write_file(dir + "/steps.tsv", steps_to_tsv(result.trace));
  write_file(dir + "/summary.json", summary_to_json(result));
  write_file(dir + "/timing.json", timing_to_json(result.metrics));
  save_profile(result.profile, dir + "/profile.json");
}

}  // namespace alipmpc
