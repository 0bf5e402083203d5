#include "alipmpc/mpc_instance.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace alipmpc {

void MpcInstance::validate() const {
  if (N < 1) throw std::invalid_argument("MpcInstance: N must be >= 1");
  const auto need = static_cast<std::size_t>(N);
  if (beta.size() != need || z_des.size() != need || u_des.size() != need ||
      z_lo.size() != need || z_hi.size() != need || u_lo.size() != need ||
      u_hi.size() != need) {
    throw std::invalid_argument("MpcInstance: per-step arrays must have size N");
  }
  if (!(sigma_lo > 0.0) || !(sigma_lo <= sigma_hi)) {
    throw std::invalid_argument("MpcInstance: bad sigma bounds");
  }
  for (int k = 0; k < N; ++k) {
    if (z_lo[k].x() > z_hi[k].x() || z_lo[k].y() > z_hi[k].y() ||
        u_lo[k].x() > u_hi[k].x() || u_lo[k].y() > u_hi[k].y()) {
      throw std::invalid_argument("MpcInstance: empty box at step " +
                                  std::to_string(k + 1));
    }
  }
}

const char* to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::Solved: return "solved";
    case PlanStatus::Degraded: return "degraded";
    case PlanStatus::Infeasible: return "infeasible";
  }
  return "?";
}

double instance_cost(const MpcInstance& inst, const std::vector<DcmVec>& z,
                     const std::vector<double>& sigma,
                     const std::vector<DcmVec>& u) {
  double f = 0.0;
  for (int k = 0; k < inst.N; ++k) {
    const double b = inst.beta[k];
    const DcmVec dz = z[k] - inst.z_des[k];
    const DcmVec du = u[k] - inst.u_des[k];
    const double ds = sigma[k] - inst.sigma_des;
    f += b * (inst.alpha[0] * dz.x() * dz.x() + inst.alpha[1] * dz.y() * dz.y() +
              inst.alpha[2] * ds * ds + inst.alpha[3] * du.x() * du.x() +
              inst.alpha[4] * du.y() * du.y());
  }
  return f;
}

double dynamics_residual(const MpcInstance& inst, const std::vector<DcmVec>& z,
                         const std::vector<double>& sigma,
                         const std::vector<DcmVec>& u) {
  double r = 0.0;
  for (int k = 0; k < inst.N; ++k) {
    const DcmVec prev = k == 0 ? inst.z0 : z[k - 1];
    const DcmVec c = z[k] - (sigma[k] * prev - u[k]);
    r = std::max(r, c.lpNorm<Eigen::Infinity>());
  }
  return r;
}

namespace {

nlohmann::json vec2_json(const DcmVec& v) { return {v.x(), v.y()}; }
DcmVec json_vec2(const nlohmann::json& j) {
  return DcmVec(j.at(0).get<double>(), j.at(1).get<double>());
}

nlohmann::json vec2s_json(const std::vector<DcmVec>& vs) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& v : vs) a.push_back(vec2_json(v));
  return a;
}

std::vector<DcmVec> json_vec2s(const nlohmann::json& j) {
  std::vector<DcmVec> out;
  for (const auto& e : j) out.push_back(json_vec2(e));
  return out;
}

}  // namespace

std::string instance_to_json(const MpcInstance& inst, const WarmStart& warm) {
  nlohmann::json j;
  j["N"] = inst.N;
  j["z0"] = vec2_json(inst.z0);
  j["sigma"] = {{"lo", inst.sigma_lo}, {"hi", inst.sigma_hi},
                {"des", inst.sigma_des}};
  j["alpha"] = inst.alpha;
  j["beta"] = inst.beta;
  j["z_des"] = vec2s_json(inst.z_des);
  j["u_des"] = vec2s_json(inst.u_des);
  j["z_lo"] = vec2s_json(inst.z_lo);
  j["z_hi"] = vec2s_json(inst.z_hi);
  j["u_lo"] = vec2s_json(inst.u_lo);
  j["u_hi"] = vec2s_json(inst.u_hi);
  if (!warm.empty()) {
    j["warm_start"] = {{"z", vec2s_json(warm.z)},
                       {"sigma", warm.sigma},
                       {"u", vec2s_json(warm.u)}};
  }
  return j.dump(2);
}

std::pair<MpcInstance, WarmStart> instance_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  MpcInstance inst;
  inst.N = j.at("N").get<int>();
  inst.z0 = json_vec2(j.at("z0"));
  inst.sigma_lo = j.at("sigma").at("lo").get<double>();
  inst.sigma_hi = j.at("sigma").at("hi").get<double>();
  inst.sigma_des = j.at("sigma").at("des").get<double>();
  inst.alpha = j.at("alpha").get<std::array<double, 5>>();
  inst.beta = j.at("beta").get<std::vector<double>>();
  inst.z_des = json_vec2s(j.at("z_des"));
  inst.u_des = json_vec2s(j.at("u_des"));
  inst.z_lo = json_vec2s(j.at("z_lo"));
  inst.z_hi = json_vec2s(j.at("z_hi"));
  inst.u_lo = json_vec2s(j.at("u_lo"));
  inst.u_hi = json_vec2s(j.at("u_hi"));
  inst.validate();
  WarmStart warm;
  if (j.contains("warm_start")) {
    warm.z = json_vec2s(j.at("warm_start").at("z"));
    warm.sigma = j.at("warm_start").at("sigma").get<std::vector<double>>();
    warm.u = json_vec2s(j.at("warm_start").at("u"));
  }
  return {inst, warm};
}

void save_instance(const MpcInstance& inst, const WarmStart& warm,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write instance file: " + path);
  out << instance_to_json(inst, warm) << "\n";
}

std::pair<MpcInstance, WarmStart> load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read instance file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

}  // namespace alipmpc
