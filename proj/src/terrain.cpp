#include "alipmpc/terrain.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "alipmpc/rng.hpp"

namespace alipmpc {
namespace {

constexpr std::size_t kStonesPerProfile = 32;
constexpr std::size_t kPerturbStones = 24;
constexpr double kRandomLMin = 0.2, kRandomLMax = 0.5;
constexpr double kRandomWMax = 0.15;

void check_randomized_range(const Range& r, double lo, double hi,
                            const char* name) {
  if (r.is_constant()) return;
  if (r.lo < lo - 1e-12 || r.hi > hi + 1e-12 || r.lo > r.hi) {
    throw InvalidProfileParams(std::string("profile range for ") + name +
                               " outside its admissible domain");
  }
}

void check_constant(double v, double mag, const char* name) {
  if (std::abs(v) > mag) {
    throw InvalidProfileParams(std::string("constant ") + name +
                               " is not physically plausible");
  }
}

}  // namespace

const char* to_string(ProfileId id) {
  switch (id) {
    case ProfileId::I: return "I";
    case ProfileId::II: return "II";
    case ProfileId::III: return "III";
    case ProfileId::IV: return "IV";
    case ProfileId::Perturb: return "perturb";
  }
  return "?";
}

ProfileId profile_id_from_string(const std::string& s) {
  if (s == "I" || s == "1") return ProfileId::I;
  if (s == "II" || s == "2") return ProfileId::II;
  if (s == "III" || s == "3") return ProfileId::III;
  if (s == "IV" || s == "4") return ProfileId::IV;
  if (s == "perturb" || s == "P") return ProfileId::Perturb;
  throw InvalidProfileParams("unknown profile id: " + s);
}

StoneProfile generate_profile(ProfileId id, const ProfileParams& params,
                              uint64_t seed, const GaitLimits& limits,
                              const Vec2& anchor, SwingSide first_side) {
  limits.validate();

  ProfileParams eff = params;
  std::size_t count = kStonesPerProfile;
  switch (id) {
    case ProfileId::I:
      if (!eff.L.is_constant() || !eff.W.is_constant()) {
        throw InvalidProfileParams("Profile I takes constant L and W");
      }
      check_constant(eff.L.lo, 1.0, "L");
      check_constant(eff.W.lo, limits.w_l, "W");
      break;
    case ProfileId::II:
      if (eff.L.is_constant()) eff.L = {kRandomLMin, kRandomLMax};
      if (eff.W.is_constant()) eff.W = {-kRandomWMax, kRandomWMax};
      break;
    case ProfileId::III:
      // L follows the 8-step square wave below; W is drawn.
      if (eff.W.is_constant()) eff.W = {-kRandomWMax, kRandomWMax};
      break;
    case ProfileId::IV:
      if (eff.L.is_constant()) eff.L = {kRandomLMin, kRandomLMax};
      break;
    case ProfileId::Perturb:
      eff.L = Range::constant(0.4);
      eff.W = Range::constant(0.0);
      count = kPerturbStones;
      break;
  }
  check_randomized_range(eff.L, kRandomLMin, kRandomLMax, "L");
  check_randomized_range(eff.W, -kRandomWMax, kRandomWMax, "W");

  Xoshiro256pp rng(seed);
  StoneProfile profile;
  profile.seed = seed;
  profile.profile_id = id;
  profile.anchor = anchor;
  profile.first_side = first_side;
  profile.stones.reserve(count);

  Vec2 prev = anchor;
  double s = first_side == SwingSide::LeftSwing ? 1.0 : -1.0;
  for (std::size_t k = 0; k < count; ++k) {
    double L, W;
    // Profiles III and IV pin one channel to an 8-step square wave.
    if (id == ProfileId::III) {
      L = (k / 8) % 2 == 0 ? 0.2 : 0.5;
    } else if (eff.L.is_constant()) {
      L = eff.L.lo;
    } else {
      L = rng.uniform(eff.L.lo, eff.L.hi);
    }
    if (id == ProfileId::IV) {
      W = (k / 8) % 2 == 0 ? -0.1 : 0.1;
    } else if (eff.W.is_constant()) {
      W = eff.W.lo;
    } else {
      W = rng.uniform(eff.W.lo, eff.W.hi);
    }

    Stone stone;
    stone.center_world = prev + Vec2(L, s * limits.w_l + W);
    profile.stones.push_back(stone);
    prev = stone.center_world;
    s = -s;
  }
  return profile;
}

Stone stone_in_frame(const StoneProfile& profile, std::size_t k,
                     const Vec2& origin_world) {
  if (k >= profile.stones.size()) {
    throw IndexOutOfRange("stone_in_frame: index " + std::to_string(k) +
                          " out of range");
  }
  Stone s = profile.stones[k];
  s.center_world -= origin_world;
  return s;
}

std::string profile_to_json(const StoneProfile& profile) {
  nlohmann::json j;
  j["profile_id"] = to_string(profile.profile_id);
  j["seed"] = profile.seed;
  j["anchor"] = {profile.anchor.x(), profile.anchor.y()};
  j["first_side"] = to_string(profile.first_side);
  auto& stones = j["stones"] = nlohmann::json::array();
  for (const Stone& s : profile.stones) {
    stones.push_back({{"center", {s.center_world.x(), s.center_world.y()}},
                      {"half_extent", {s.half_extent.x(), s.half_extent.y()}}});
  }
  return j.dump(2);
}

StoneProfile profile_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  StoneProfile p;
  p.profile_id = profile_id_from_string(j.at("profile_id").get<std::string>());
  p.seed = j.at("seed").get<uint64_t>();
  p.anchor = Vec2(j.at("anchor")[0].get<double>(),
                  j.at("anchor")[1].get<double>());
  p.first_side = j.at("first_side").get<std::string>() == "left"
                     ? SwingSide::LeftSwing
                     : SwingSide::RightSwing;
  for (const auto& js : j.at("stones")) {
    Stone s;
    s.center_world = Vec2(js.at("center")[0].get<double>(),
                          js.at("center")[1].get<double>());
    s.half_extent = Vec2(js.at("half_extent")[0].get<double>(),
                         js.at("half_extent")[1].get<double>());
    p.stones.push_back(s);
  }
  return p;
}

void save_profile(const StoneProfile& profile, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write profile file: " + path);
  out << profile_to_json(profile) << "\n";
}

StoneProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read profile file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return profile_from_json(ss.str());
}

}  // namespace alipmpc
