#include "alipmpc/config_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace alipmpc {
namespace {

using nlohmann::json;

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void maybe_vec2(const json& j, const char* key, Vec2& out) {
  if (j.contains(key)) {
    out = Vec2(j.at(key).at(0).get<double>(), j.at(key).at(1).get<double>());
  }
}

}  // namespace

SimConfig sim_config_from_json(const std::string& text, SimConfig cfg) {
  const json j = json::parse(text);

  if (j.contains("model")) {
    const json& m = j.at("model");
    double mass = cfg.model.m, z0 = cfg.model.z0, g = cfg.model.g;
    maybe(m, "m", mass);
    maybe(m, "z0", z0);
    maybe(m, "g", g);
    cfg.model = ModelParams::make(mass, z0, g);
  }
  if (j.contains("limits")) {
    const json& l = j.at("limits");
    maybe(l, "T_min", cfg.planner.limits.T_min);
    maybe(l, "T_max", cfg.planner.limits.T_max);
    maybe(l, "L_min", cfg.planner.limits.L_min);
    maybe(l, "L_max", cfg.planner.limits.L_max);
    maybe(l, "W_l_min", cfg.planner.limits.W_l_min);
    maybe(l, "W_l_max", cfg.planner.limits.W_l_max);
    maybe(l, "w_l", cfg.planner.limits.w_l);
  }
  if (j.contains("planner")) {
    const json& p = j.at("planner");
    maybe(p, "N", cfg.planner.N);
    maybe(p, "T_des", cfg.planner.T_des);
    maybe(p, "beta_base", cfg.planner.beta_base);
    if (p.contains("alpha")) {
      cfg.planner.alpha = p.at("alpha").get<std::array<double, 5>>();
    }
    if (p.contains("scp")) {
      const json& s = p.at("scp");
      maybe(s, "max_outer_iters", cfg.planner.scp.max_outer_iters);
      maybe(s, "trust_region_init", cfg.planner.scp.trust_region_init);
      maybe(s, "trust_shrink", cfg.planner.scp.trust_shrink);
      maybe(s, "trust_expand", cfg.planner.scp.trust_expand);
      maybe(s, "feasibility_tol", cfg.planner.scp.feasibility_tol);
      maybe(s, "cost_tol", cfg.planner.scp.cost_tol);
      maybe(s, "restoration_tol", cfg.planner.scp.restoration_tol);
      maybe(s, "cold_sigma_grid", cfg.planner.scp.cold_sigma_grid);
    }
    cfg.horizon = cfg.planner.N;
  }
  if (j.contains("sim")) {
    const json& s = j.at("sim");
    maybe(s, "tick", cfg.tick);
    maybe(s, "replan_period", cfg.replan_period);
    maybe(s, "landing_noise", cfg.landing_noise);
    maybe(s, "latency_ticks", cfg.latency_ticks);
    maybe(s, "fall_multiplier", cfg.fall_multiplier);
    maybe(s, "horizon", cfg.horizon);
    if (s.contains("planner")) {
      const std::string mode = s.at("planner").get<std::string>();
      if (mode == "mpc") {
        cfg.planner_mode = PlannerMode::Mpc;
      } else if (mode == "qp") {
        cfg.planner_mode = PlannerMode::Qp;
      } else {
        throw ConfigError("sim.planner must be 'mpc' or 'qp'");
      }
    }
    if (s.contains("run_in")) {
      const json& r = s.at("run_in");
      maybe(r, "steps", cfg.run_in.steps);
      maybe(r, "ramp_full_at", cfg.run_in.ramp_full_at);
      maybe_vec2(r, "half_extent", cfg.run_in.half_extent);
    }
  }
  if (j.contains("scenario")) {
    const json& s = j.at("scenario");
    if (s.contains("profile")) {
      cfg.scenario.profile =
          profile_id_from_string(s.at("profile").get<std::string>());
    }
    maybe(s, "seed", cfg.scenario.seed);
    if (s.contains("L")) {
      if (s.at("L").is_array()) {
        cfg.scenario.params.L = {s.at("L").at(0).get<double>(),
                                 s.at("L").at(1).get<double>()};
      } else {
        cfg.scenario.params.L = Range::constant(s.at("L").get<double>());
      }
    }
    if (s.contains("W")) {
      if (s.at("W").is_array()) {
        cfg.scenario.params.W = {s.at("W").at(0).get<double>(),
                                 s.at("W").at(1).get<double>()};
      } else {
        cfg.scenario.params.W = Range::constant(s.at("W").get<double>());
      }
    }
    if (s.contains("perturbations")) {
      cfg.scenario.perturbations.clear();
      for (const json& pj : s.at("perturbations")) {
        Perturbation pert;
        pert.step_index = pj.at("step").get<int>();
        pert.force = Vec2(pj.at("force").at(0).get<double>(),
                          pj.at("force").at(1).get<double>());
        maybe(pj, "t_start", pert.t_start);
        maybe(pj, "t_end", pert.t_end);
        cfg.scenario.perturbations.push_back(pert);
      }
    }
  }
  return cfg;
}

SimConfig load_sim_config(const std::string& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return sim_config_from_json(ss.str(), std::move(base));
}

std::string sim_config_to_json(const SimConfig& cfg) {
  json j;
  j["model"] = {{"m", cfg.model.m}, {"z0", cfg.model.z0}, {"g", cfg.model.g}};
  j["limits"] = {{"T_min", cfg.planner.limits.T_min},
                 {"T_max", cfg.planner.limits.T_max},
                 {"L_min", cfg.planner.limits.L_min},
                 {"L_max", cfg.planner.limits.L_max},
                 {"W_l_min", cfg.planner.limits.W_l_min},
                 {"W_l_max", cfg.planner.limits.W_l_max},
                 {"w_l", cfg.planner.limits.w_l}};
  j["planner"] = {{"N", cfg.planner.N},
                  {"T_des", cfg.planner.T_des},
                  {"alpha", cfg.planner.alpha},
                  {"beta_base", cfg.planner.beta_base},
                  {"scp",
                   {{"max_outer_iters", cfg.planner.scp.max_outer_iters},
                    {"trust_region_init", cfg.planner.scp.trust_region_init},
                    {"trust_shrink", cfg.planner.scp.trust_shrink},
                    {"trust_expand", cfg.planner.scp.trust_expand},
                    {"feasibility_tol", cfg.planner.scp.feasibility_tol},
                    {"cost_tol", cfg.planner.scp.cost_tol},
                    {"restoration_tol", cfg.planner.scp.restoration_tol},
                    {"cold_sigma_grid", cfg.planner.scp.cold_sigma_grid}}}};
  j["sim"] = {{"tick", cfg.tick},
              {"replan_period", cfg.replan_period},
              {"planner", cfg.planner_mode == PlannerMode::Mpc ? "mpc" : "qp"},
              {"horizon", cfg.horizon},
              {"landing_noise", cfg.landing_noise},
              {"latency_ticks", cfg.latency_ticks},
              {"fall_multiplier", cfg.fall_multiplier},
              {"run_in",
               {{"steps", cfg.run_in.steps},
                {"ramp_full_at", cfg.run_in.ramp_full_at},
                {"half_extent",
                 {cfg.run_in.half_extent.x(), cfg.run_in.half_extent.y()}}}}};
  json perts = json::array();
  for (const Perturbation& p : cfg.scenario.perturbations) {
    perts.push_back({{"step", p.step_index},
                     {"force", {p.force.x(), p.force.y()}},
                     {"t_start", p.t_start},
                     {"t_end", p.t_end}});
  }
  j["scenario"] = {{"profile", to_string(cfg.scenario.profile)},
                   {"seed", cfg.scenario.seed},
                   {"L", {cfg.scenario.params.L.lo, cfg.scenario.params.L.hi}},
                   {"W", {cfg.scenario.params.W.lo, cfg.scenario.params.W.hi}},
                   {"perturbations", perts}};
  return j.dump(2) + "\n";
}

}  // namespace alipmpc
