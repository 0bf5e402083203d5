#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "alipmpc/alip_model.hpp"
#include "alipmpc/rng.hpp"
#include "support/oracles.hpp"

using namespace alipmpc;

namespace {
const ModelParams kUnitMass = ModelParams::make(1.0, 0.9, 9.81);
const ModelParams kDigit = ModelParams::make(46.0, 0.9, 9.81);
const GaitLimits kLimits;

AlipState random_state(Xoshiro256pp& rng, double scale_pos, double scale_mom) {
  return AlipState{rng.uniform(-scale_pos, scale_pos),
                   rng.uniform(-scale_pos, scale_pos),
                   rng.uniform(-scale_mom, scale_mom),
                   rng.uniform(-scale_mom, scale_mom)};
}
}  // namespace

TEST_CASE("lambda is derived from g and z0") {
  CHECK(kDigit.lambda == doctest::Approx(std::sqrt(9.81 / 0.9)).epsilon(1e-15));
  CHECK_THROWS_AS(ModelParams::make(-1.0, 0.9, 9.81), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::make(1.0, 0.0, 9.81), std::invalid_argument);
}

TEST_CASE("dcm_from_state") {
  CHECK(dcm_from_state(AlipState{}, kDigit).norm() == 0.0);

  // Independent evaluation of the transform with its own lambda.
  const double lam = std::sqrt(9.81 / 0.9);
  const AlipState s{0.1, 0.0, 0.0, 0.9 * lam * 0.05};
  const DcmVec xi = dcm_from_state(s, kUnitMass);
  CHECK(xi.x() == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(xi.y() == doctest::Approx(0.0));

  // Positive L_x opposes positive y velocity, so it drags the DCM negative.
  const AlipState spin{0.0, 0.0, 0.5, 0.0};
  CHECK(dcm_from_state(spin, kDigit).y() < 0.0);
}

TEST_CASE("flow_state zero time and cosh growth") {
  const AlipState s0{0.1, -0.05, 0.2, -0.1};
  const AlipState same = flow_state(s0, 0.0, kDigit);
  CHECK(same.x_c == doctest::Approx(s0.x_c).epsilon(1e-15));
  CHECK(same.L_y == doctest::Approx(s0.L_y).epsilon(1e-15));

  const AlipState rest{0.1, 0.0, 0.0, 0.0};
  const AlipState moved = flow_state(rest, 0.1, kUnitMass);
  CHECK(moved.x_c ==
        doctest::Approx(0.1 * std::cosh(kUnitMass.lambda * 0.1)).epsilon(1e-12));
  CHECK(moved.x_c == doctest::Approx(0.10550).epsilon(1e-4));

  const AlipState rk = test::rk4_flow(rest, 0.1, kUnitMass, std::nullopt);
  CHECK(moved.x_c == doctest::Approx(rk.x_c).epsilon(1e-6));
  CHECK(moved.L_y == doctest::Approx(rk.L_y).epsilon(1e-6));
}

TEST_CASE("flow matches RK4 on random states, forced and unforced") {
  Xoshiro256pp rng(7);
  for (int i = 0; i < 20; ++i) {
    const AlipState s0 = random_state(rng, 0.2, 5.0);
    const double t = rng.uniform(0.01, 0.4);
    std::optional<Vec2> force;
    if (i % 2 == 1) force = Vec2(rng.uniform(-150, 150), rng.uniform(-80, 80));
    const AlipState a = flow_state(s0, t, kDigit, force);
    const AlipState b = test::rk4_flow(s0, t, kDigit, force);
    CHECK(a.x_c == doctest::Approx(b.x_c).epsilon(1e-8));
    CHECK(a.y_c == doctest::Approx(b.y_c).epsilon(1e-8));
    CHECK(a.L_x == doctest::Approx(b.L_x).epsilon(1e-8));
    CHECK(a.L_y == doctest::Approx(b.L_y).epsilon(1e-8));
  }
}

TEST_CASE("DCM flow commutation and exponential growth") {
  Xoshiro256pp rng(11);
  for (int i = 0; i < 200; ++i) {
    const AlipState s0 = random_state(rng, 0.3, 8.0);
    const double t = rng.uniform(0.0, 1.0);
    const DcmVec via_state = dcm_from_state(flow_state(s0, t, kDigit), kDigit);
    const DcmVec via_dcm = dcm_at_time(dcm_from_state(s0, kDigit), t, kDigit);
    CHECK((via_state - via_dcm).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("dcm_at_time examples") {
  const DcmVec xi0(0.095, 0.0);
  CHECK(dcm_at_time(xi0, 0.0, kDigit) == xi0);
  CHECK(dcm_at_time(DcmVec::Zero(), 3.0, kDigit).norm() == 0.0);
  const DcmVec grown = dcm_at_time(xi0, 0.5, kDigit);
  CHECK(grown.x() == doctest::Approx(0.49501).epsilon(1e-4));
  CHECK(grown.x() ==
        doctest::Approx(0.095 * std::exp(std::sqrt(9.81 / 0.9) * 0.5))
            .epsilon(1e-12));
}

TEST_CASE("reset_map fixed points") {
  CHECK(reset_map(DcmVec::Zero(), Footstep{Vec2(0.0, 0.0), 0.5}, kDigit).norm() ==
        0.0);

  const DcmVec znom = nominal_initial_dcm(0.4, 0.0, 0.5, SwingSide::LeftSwing,
                                          kDigit, kLimits);
  CHECK(znom.x() == doctest::Approx(0.09500).epsilon(1e-4));
  const DcmVec once =
      reset_map(znom, Footstep{Vec2(0.4, kLimits.w_l), 0.5}, kDigit);
  CHECK(once.x() == doctest::Approx(znom.x()).epsilon(1e-12));

  // The map is expansive (that is the whole point of the DCM), so a naive
  // 32-fold double-precision iteration amplifies one ulp of rounding by
  // sigma^32. Periodicity is checked per application across all 32 steps.
  for (int k = 0; k < 32; ++k) {
    const SwingSide side =
        k % 2 == 0 ? SwingSide::LeftSwing : SwingSide::RightSwing;
    const DcmVec start =
        nominal_initial_dcm(0.4, 0.0, 0.5, side, kDigit, kLimits);
    const DcmVec z =
        reset_map(start, Footstep{Vec2(0.4, kLimits.w(side)), 0.5, side},
                  kDigit);
    const DcmVec expect =
        nominal_initial_dcm(0.4, 0.0, 0.5, other_side(side), kDigit, kLimits);
    CHECK((z - expect).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("nominal_initial_dcm values") {
  const DcmVec in_place = nominal_initial_dcm(0.0, 0.0, 0.5,
                                              SwingSide::LeftSwing, kDigit,
                                              kLimits);
  CHECK(in_place.x() == 0.0);
  CHECK(in_place.y() == doctest::Approx(0.04508).epsilon(1e-4));

  GaitLimits zero_w = kLimits;
  zero_w.w_l = 0.0;
  CHECK(nominal_initial_dcm(0.0, 0.0, 0.5, SwingSide::LeftSwing, kDigit, zero_w)
            .norm() == 0.0);
}

TEST_CASE("two-step lateral cycle returns to start") {
  Xoshiro256pp rng(3);
  for (int i = 0; i < 100; ++i) {
    const double L = rng.uniform(-0.5, 0.5);
    const double W = rng.uniform(-0.18, 0.22);
    const double T = rng.uniform(0.35, 0.65);
    const SwingSide side =
        rng.uniform01() < 0.5 ? SwingSide::LeftSwing : SwingSide::RightSwing;
    const DcmVec z0 = nominal_initial_dcm(L, W, T, side, kDigit, kLimits);
    const DcmVec z1 = reset_map(
        z0, Footstep{Vec2(L, kLimits.w(side) + W), T, side}, kDigit);
    const DcmVec z2 = reset_map(
        z1, Footstep{Vec2(L, kLimits.w(other_side(side)) + W), T}, kDigit);
    CHECK(z1.x() == doctest::Approx(z0.x()).epsilon(1e-9));
    CHECK((z2 - z0).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("orbital energy is conserved along the unforced flow") {
  Xoshiro256pp rng(23);
  for (int i = 0; i < 50; ++i) {
    const AlipState s0 = random_state(rng, 0.25, 6.0);
    const double t = rng.uniform(0.0, 1.0);
    const AlipState s1 = flow_state(s0, t, kDigit);
    const double ex0 = orbital_energy(s0.x_c, s0.L_y, kDigit);
    const double ex1 = orbital_energy(s1.x_c, s1.L_y, kDigit);
    const double ey0 = orbital_energy(s0.y_c, -s0.L_x, kDigit);
    const double ey1 = orbital_energy(s1.y_c, -s1.L_x, kDigit);
    CHECK(std::abs(ex1 - ex0) < 1e-8 * (1.0 + std::abs(ex0)));
    CHECK(std::abs(ey1 - ey0) < 1e-8 * (1.0 + std::abs(ey0)));
  }
}
