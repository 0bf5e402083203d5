#pragma once

#include <array>
#include <string>
#include <vector>

#include "alipmpc/types.hpp"

namespace alipmpc {

/// One planning problem over N future steps in the decision variables
/// (z^k, sigma^k, u^k), k = 1..N:
///
///   min  sum_k beta[k] ( a_zx (z_x-des)^2 + a_zy (z_y-des)^2
///                      + a_s (sigma-des)^2 + a_ux (u_x-des)^2
///                      + a_uy (u_y-des)^2 )
///   s.t. z^k = sigma^k z^{k-1} - u^k        (z^0 given)
///        boxes on z^k, sigma^k, u^k.
///
/// Everything is expressed in the current contact frame. The per-step z
/// boxes already carry the left/right alternation.
struct MpcInstance {
  int N = 0;
  DcmVec z0 = DcmVec::Zero();
  double sigma_lo = 0.0, sigma_hi = 0.0, sigma_des = 0.0;
  std::array<double, 5> alpha{};      // weights for (z_x, z_y, sigma, u_x, u_y)
  std::vector<double> beta;           // per-step decay, size N
  std::vector<DcmVec> z_des, u_des;   // size N
  std::vector<DcmVec> z_lo, z_hi, u_lo, u_hi;

  int num_vars() const { return 5 * N; }
  void validate() const;
};

enum class PlanStatus { Solved, Degraded, Infeasible };
const char* to_string(PlanStatus s);

struct PlanDiagnostics {
  double feasibility_residual = 0.0;  // max_k |z^k - (sigma^k z^{k-1} - u^k)|
  int iterations = 0;                 // outer iterations (or QP iterations)
  double total_cost = 0.0;
  PlanStatus status = PlanStatus::Solved;
  /// (penalty weight, merit value) at every accepted iterate; the merit is
  /// non-increasing between entries that share a penalty weight.
  std::vector<std::pair<double, double>> merit_history;
};

/// Per-horizon-step triples plus solver diagnostics.
struct PlanSolution {
  std::vector<DcmVec> z;
  std::vector<double> sigma;
  std::vector<DcmVec> u;
  PlanDiagnostics diagnostics;

  int horizon() const { return static_cast<int>(sigma.size()); }
  bool usable() const {
    return diagnostics.status != PlanStatus::Infeasible && horizon() > 0;
  }
};

/// Warm-start triple for the solver (same layout as a solution).
struct WarmStart {
  std::vector<DcmVec> z;
  std::vector<double> sigma;
  std::vector<DcmVec> u;
  bool empty() const { return sigma.empty(); }
};

double instance_cost(const MpcInstance& inst, const std::vector<DcmVec>& z,
                     const std::vector<double>& sigma,
                     const std::vector<DcmVec>& u);

/// max_k ||z^k - (sigma^k z^{k-1} - u^k)||_inf
double dynamics_residual(const MpcInstance& inst, const std::vector<DcmVec>& z,
                         const std::vector<double>& sigma,
                         const std::vector<DcmVec>& u);

std::string instance_to_json(const MpcInstance& inst, const WarmStart& warm);
std::pair<MpcInstance, WarmStart> instance_from_json(const std::string& text);
void save_instance(const MpcInstance& inst, const WarmStart& warm,
                   const std::string& path);
std::pair<MpcInstance, WarmStart> load_instance(const std::string& path);

}  // namespace alipmpc
