#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "alipmpc/terrain.hpp"

using namespace alipmpc;

namespace {
const GaitLimits kLimits;
}

TEST_CASE("profile I has constant spacing and alternating widths") {
  ProfileParams params{Range::constant(0.4), Range::constant(0.0)};
  const StoneProfile p = generate_profile(ProfileId::I, params, 1, kLimits);
  REQUIRE(p.stones.size() == 32);
  Vec2 prev = p.anchor;
  double s = 1.0;
  for (const Stone& stone : p.stones) {
    const Vec2 d = stone.center_world - prev;
    CHECK(d.x() == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(d.y() == doctest::Approx(s * 0.28).epsilon(1e-12));
    CHECK(stone.half_extent.x() == doctest::Approx(0.1));
    CHECK(stone.half_extent.y() == doctest::Approx(0.05));
    prev = stone.center_world;
    s = -s;
  }
}

TEST_CASE("profile III follows the square-wave length pattern") {
  const StoneProfile p =
      generate_profile(ProfileId::III, ProfileParams{}, 42, kLimits);
  REQUIRE(p.stones.size() == 32);
  Vec2 prev = p.anchor;
  for (int k = 0; k < 32; ++k) {
    const double L = (p.stones[k].center_world - prev).x();
    const double expect = (k / 8) % 2 == 0 ? 0.2 : 0.5;
    CHECK(L == doctest::Approx(expect).epsilon(1e-12));
    prev = p.stones[k].center_world;
  }
}

TEST_CASE("profile IV follows the square-wave width pattern") {
  const StoneProfile p =
      generate_profile(ProfileId::IV, ProfileParams{}, 9, kLimits);
  Vec2 prev = p.anchor;
  double s = 1.0;
  for (int k = 0; k < 32; ++k) {
    const double W = (p.stones[k].center_world - prev).y() - s * kLimits.w_l;
    const double expect = (k / 8) % 2 == 0 ? -0.1 : 0.1;
    CHECK(W == doctest::Approx(expect).epsilon(1e-12));
    prev = p.stones[k].center_world;
    s = -s;
  }
}

TEST_CASE("randomized draws stay inside the table domains") {
  for (uint64_t seed : {1ull, 7ull, 99ull}) {
    const StoneProfile p =
        generate_profile(ProfileId::II, ProfileParams{}, seed, kLimits);
    Vec2 prev = p.anchor;
    double s = 1.0;
    for (const Stone& stone : p.stones) {
      const Vec2 d = stone.center_world - prev;
      CHECK(d.x() >= 0.2);
      CHECK(d.x() <= 0.5);
      const double W = d.y() - s * kLimits.w_l;
      CHECK(W >= -0.15);
      CHECK(W <= 0.15);
      prev = stone.center_world;
      s = -s;
    }
  }
}

TEST_CASE("same seed reproduces the same profile") {
  const StoneProfile a =
      generate_profile(ProfileId::II, ProfileParams{}, 1234, kLimits);
  const StoneProfile b =
      generate_profile(ProfileId::II, ProfileParams{}, 1234, kLimits);
  REQUIRE(a.stones.size() == b.stones.size());
  for (std::size_t i = 0; i < a.stones.size(); ++i) {
    CHECK(a.stones[i].center_world == b.stones[i].center_world);
  }
}

TEST_CASE("perturbation profile is 24 stones of fixed spacing") {
  const StoneProfile p =
      generate_profile(ProfileId::Perturb, ProfileParams{}, 5, kLimits);
  REQUIRE(p.stones.size() == 24);
  Vec2 prev = p.anchor;
  double s = 1.0;
  for (const Stone& stone : p.stones) {
    CHECK((stone.center_world - prev).x() == doctest::Approx(0.4));
    CHECK((stone.center_world - prev).y() == doctest::Approx(s * 0.28));
    prev = stone.center_world;
    s = -s;
  }
}

TEST_CASE("stone_in_frame translation") {
  ProfileParams params{Range::constant(0.4), Range::constant(0.0)};
  const StoneProfile p = generate_profile(ProfileId::I, params, 1, kLimits);

  const Stone self = stone_in_frame(p, 3, p.stones[3].center_world);
  CHECK(self.center_world.norm() == 0.0);

  const Stone abs0 = stone_in_frame(p, 1, Vec2::Zero());
  CHECK(abs0.center_world == p.stones[1].center_world);

  for (std::size_t k = 1; k < p.stones.size(); ++k) {
    const Stone rel = stone_in_frame(p, k, p.stones[k - 1].center_world);
    const double s = k % 2 == 0 ? 1.0 : -1.0;
    CHECK(rel.center_world.x() == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(rel.center_world.y() == doctest::Approx(s * 0.28).epsilon(1e-12));
  }

  CHECK_THROWS_AS(stone_in_frame(p, 32, Vec2::Zero()), IndexOutOfRange);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(
      generate_profile(ProfileId::I, ProfileParams{Range{0.2, 0.5}, {}}, 1,
                       kLimits),
      InvalidProfileParams);
  CHECK_THROWS_AS(
      generate_profile(ProfileId::I,
                       ProfileParams{Range::constant(2.0), Range::constant(0)},
                       1, kLimits),
      InvalidProfileParams);
  CHECK_THROWS_AS(
      generate_profile(ProfileId::II, ProfileParams{Range{0.1, 0.6}, {}}, 1,
                       kLimits),
      InvalidProfileParams);
  CHECK_THROWS_AS(
      generate_profile(ProfileId::III, ProfileParams{{}, Range{-0.3, 0.3}}, 1,
                       kLimits),
      InvalidProfileParams);
}

TEST_CASE("profile files round-trip") {
  const StoneProfile p =
      generate_profile(ProfileId::II, ProfileParams{}, 77, kLimits,
                       Vec2(1.8, -0.14));
  const std::string path =
      (std::filesystem::temp_directory_path() / "alipmpc_profile.json")
          .string();
  save_profile(p, path);
  const StoneProfile q = load_profile(path);
  CHECK(q.seed == p.seed);
  CHECK(q.profile_id == p.profile_id);
  CHECK(q.anchor == p.anchor);
  REQUIRE(q.stones.size() == p.stones.size());
  for (std::size_t i = 0; i < p.stones.size(); ++i) {
    CHECK(q.stones[i].center_world == p.stones[i].center_world);
    CHECK(q.stones[i].half_extent == p.stones[i].half_extent);
  }
  std::filesystem::remove(path);
}
