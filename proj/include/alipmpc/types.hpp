#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace alipmpc {

using Vec2 = Eigen::Vector2d;

/// Planar divergent-component-of-motion value (xi_x, xi_y), contact frame.
using DcmVec = Eigen::Vector2d;

enum class SwingSide { LeftSwing, RightSwing };

inline SwingSide other_side(SwingSide s) {
  return s == SwingSide::LeftSwing ? SwingSide::RightSwing
                                   : SwingSide::LeftSwing;
}

inline const char* to_string(SwingSide s) {
  return s == SwingSide::LeftSwing ? "left" : "right";
}

/// Pendulum model constants. `lambda` is always sqrt(g / z0); use make() so
/// it can never drift out of sync with g and z0.
struct ModelParams {
  double m = 46.0;    // kg
  double z0 = 0.9;    // m, constant CoM height
  double g = 9.81;    // m/s^2
  double lambda = std::sqrt(9.81 / 0.9);  // 1/s

  static ModelParams make(double m, double z0, double g) {
    if (!(m > 0.0) || !(z0 > 0.0) || !(g > 0.0)) {
      throw std::invalid_argument("ModelParams: m, z0, g must be positive");
    }
    ModelParams p;
    p.m = m;
    p.z0 = z0;
    p.g = g;
    p.lambda = std::sqrt(g / z0);
    return p;
  }

  /// m * z0 * lambda, the momentum-to-velocity scale that appears in the
  /// DCM transform.
  double momentum_scale() const { return m * z0 * lambda; }
};

/// CoM position and contact angular momentum in the current contact frame.
struct AlipState {
  double x_c = 0.0;  // m
  double y_c = 0.0;  // m
  double L_x = 0.0;  // kg m^2/s, opposes dy_c/dt
  double L_y = 0.0;  // kg m^2/s
};

/// Commanded step: touchdown position in the current contact frame plus
/// duration. u_y already contains the side offset (u_y = w_{l/r} + W).
struct Footstep {
  Vec2 u = Vec2::Zero();  // m
  double T = 0.5;         // s
  SwingSide side = SwingSide::LeftSwing;
};

/// Mechanical limits of the stepping hardware. The right-side W bounds and
/// w_r are mirror images of the left ones and are derived, not stored.
struct GaitLimits {
  double T_min = 0.35, T_max = 0.65;   // s
  double L_min = -0.5, L_max = 0.5;    // m
  double W_l_min = -0.18, W_l_max = 0.22;  // m
  double w_l = 0.28;                   // m, nominal step width, left swing

  double W_r_min() const { return -W_l_max; }
  double W_r_max() const { return -W_l_min; }
  double w_r() const { return -w_l; }
  double w(SwingSide s) const { return s == SwingSide::LeftSwing ? w_l : w_r(); }
  double W_min(SwingSide s) const {
    return s == SwingSide::LeftSwing ? W_l_min : W_r_min();
  }
  double W_max(SwingSide s) const {
    return s == SwingSide::LeftSwing ? W_l_max : W_r_max();
  }

  void validate() const {
    if (!(T_min < T_max) || !(T_min > 0.0)) {
      throw std::invalid_argument("GaitLimits: need 0 < T_min < T_max");
    }
    if (!(L_min < L_max) || !(W_l_min < W_l_max)) {
      throw std::invalid_argument("GaitLimits: degenerate position bounds");
    }
  }
};

/// Viability box for the per-step initial DCM. Only the left-swing y-box is
/// stored; the right-swing box is its exact mirror.
struct DcmBounds {
  double z_x_max = 0.0;
  double z_yl_min = 0.0, z_yl_max = 0.0;

  double z_x_min() const { return -z_x_max; }
  double z_yr_min() const { return -z_yl_max; }
  double z_yr_max() const { return -z_yl_min; }

  /// y-box for the initial DCM of a step whose swing foot is `side`.
  Vec2 y_box(SwingSide side) const {
    return side == SwingSide::LeftSwing ? Vec2(z_yl_min, z_yl_max)
                                        : Vec2(z_yr_min(), z_yr_max());
  }
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidProfileParams : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IndexOutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};
struct NonCausalDuration : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientTerrain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace alipmpc
