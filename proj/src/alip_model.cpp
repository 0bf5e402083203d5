#include "alipmpc/alip_model.hpp"

#include <cmath>

namespace alipmpc {

DcmVec dcm_from_state(const AlipState& s, const ModelParams& p) {
  const double k = p.momentum_scale();
  return DcmVec(s.x_c + s.L_y / k, s.y_c - s.L_x / k);
}

AlipState flow_state(const AlipState& s0, double t, const ModelParams& p,
                     const std::optional<Vec2>& f_ext) {
  const double ch = std::cosh(p.lambda * t);
  const double sh = std::sinh(p.lambda * t);
  const double k = p.momentum_scale();  // m z0 lambda

  // Constant force shifts the pendulum equilibrium; flowing about the
  // shifted point keeps the solution exact for piecewise-constant forcing.
  double x_eq = 0.0, y_eq = 0.0;
  if (f_ext) {
    x_eq = -f_ext->x() * p.z0 / (p.m * p.g);
    y_eq = -f_ext->y() * p.z0 / (p.m * p.g);
  }

  AlipState s;
  const double dx = s0.x_c - x_eq;
  s.x_c = dx * ch + (s0.L_y / k) * sh + x_eq;
  s.L_y = dx * k * sh + s0.L_y * ch;

  const double dy = s0.y_c - y_eq;
  s.y_c = dy * ch - (s0.L_x / k) * sh + y_eq;
  s.L_x = -dy * k * sh + s0.L_x * ch;
  return s;
}

DcmVec dcm_at_time(const DcmVec& xi0, double t, const ModelParams& p) {
  return xi0 * std::exp(p.lambda * t);
}

DcmVec reset_map(const DcmVec& z_prev, const Footstep& step,
                 const ModelParams& p) {
  return z_prev * std::exp(p.lambda * step.T) - step.u;
}

DcmVec nominal_initial_dcm(double L, double W, double T, SwingSide side,
                           const ModelParams& p, const GaitLimits& limits) {
  const double sigma = std::exp(p.lambda * T);
  return DcmVec(L / (sigma - 1.0),
                limits.w(side) / (sigma + 1.0) + W / (sigma - 1.0));
}

double orbital_energy(double pos, double momentum, const ModelParams& p) {
  const double v = momentum / (p.m * p.z0);
  return 0.5 * v * v - 0.5 * p.g * pos * pos / p.z0;
}

}  // namespace alipmpc
