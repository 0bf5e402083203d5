#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alipmpc/types.hpp"

namespace alipmpc {

/// Rectangular foothold in the world frame.
struct Stone {
  Vec2 center_world = Vec2::Zero();
  Vec2 half_extent = Vec2(0.1, 0.05);

  bool contains(const Vec2& p, double tol = 0.0) const {
    return std::abs(p.x() - center_world.x()) <= half_extent.x() + tol &&
           std::abs(p.y() - center_world.y()) <= half_extent.y() + tol;
  }
};

enum class ProfileId { I, II, III, IV, Perturb };

const char* to_string(ProfileId id);
ProfileId profile_id_from_string(const std::string& s);

/// Closed interval for a profile parameter; lo == hi means a constant.
struct Range {
  double lo = 0.0, hi = 0.0;
  static Range constant(double v) { return {v, v}; }
  bool is_constant() const { return lo == hi; }
};

struct ProfileParams {
  Range L = Range::constant(0.4);
  Range W = Range::constant(0.0);
};

struct StoneProfile {
  std::vector<Stone> stones;
  uint64_t seed = 0;
  ProfileId profile_id = ProfileId::I;
  /// World position of the contact the first stone is measured from (the
  /// landing spot of the last run-in step).
  Vec2 anchor = Vec2::Zero();
  /// Swing side of the step onto the first stone.
  SwingSide first_side = SwingSide::LeftSwing;

  std::size_t size() const { return stones.size(); }
};

/// Generates a stepping-stone sequence. Stone k sits at the previous center
/// plus (L^k, s_k * w_l + W^k) with s_k alternating sign from `first_side`.
/// Randomized parameters are drawn per stone, L before W, from the seeded
/// generator, so a profile is a pure function of (id, params, seed, anchor).
StoneProfile generate_profile(ProfileId id, const ProfileParams& params,
                              uint64_t seed, const GaitLimits& limits,
                              const Vec2& anchor = Vec2::Zero(),
                              SwingSide first_side = SwingSide::LeftSwing);

/// Stone k expressed relative to `origin_world` (translation only).
Stone stone_in_frame(const StoneProfile& profile, std::size_t k,
                     const Vec2& origin_world);

std::string profile_to_json(const StoneProfile& profile);
StoneProfile profile_from_json(const std::string& text);
void save_profile(const StoneProfile& profile, const std::string& path);
StoneProfile load_profile(const std::string& path);

}  // namespace alipmpc
