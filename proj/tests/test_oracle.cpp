#include <doctest.h>

#include <cmath>

#include "lurbench/oracle.hpp"

using namespace lur;

namespace {

Scene isolated_trunk_km() {
  Scene scene;
  scene.roads.push_back(
      {{{-500.0, 0.0}, {500.0, 0.0}}, RoadClass::trunk, 14.0});
  return scene;
}

}  // namespace

TEST_CASE("empty scene returns exactly the background") {
  Scene scene;
  OracleParams params;
  params.background_ugm3 = 21.5;
  CHECK(oracle_concentration(scene, {13.0, -7.0}, params) == 21.5);
}

TEST_CASE("1 m quadrature matches the 0.01 m reference within 1%") {
  const Scene scene = isolated_trunk_km();
  OracleParams params;
  params.decay_m = 50.0;
  params.road_weight_ugm3[static_cast<int>(RoadClass::trunk)] = 1.0;

  for (const Vec2 p : {Vec2{0.0, 0.0}, Vec2{100.0, 20.0}, Vec2{-450.0, 5.0},
                       Vec2{0.0, 75.0}}) {
    const double coarse = oracle_concentration(scene, p, params);
    const double fine =
        oracle_concentration_with_step(scene, p, params, 0.01);
    const double excess_coarse = coarse - params.background_ugm3;
    const double excess_fine = fine - params.background_ugm3;
    REQUIRE(excess_fine > 0.0);
    CHECK(std::abs(excess_coarse - excess_fine) / excess_fine < 0.01);
  }
}

TEST_CASE("on-road excess approximates the closed-form line integral") {
  // Infinite straight road through p: integral of exp(-|t|/l) dt = 2 l.
  // A 1 km road at l = 25 m captures nearly all of it.
  const Scene scene = isolated_trunk_km();
  OracleParams params;
  params.decay_m = 25.0;
  params.road_weight_ugm3[static_cast<int>(RoadClass::trunk)] = 1.0;
  const double excess =
      oracle_concentration(scene, {0.0, 0.0}, params) - params.background_ugm3;
  CHECK(excess == doctest::Approx(2.0 * 25.0).epsilon(0.01));
}

TEST_CASE("two symmetric roads double the single-road excess exactly") {
  OracleParams params;
  params.decay_m = 40.0;

  Scene one;
  one.roads.push_back({{{-300.0, 60.0}, {300.0, 60.0}}, RoadClass::primary,
                       10.0});
  Scene two = one;
  two.roads.push_back({{{-300.0, -60.0}, {300.0, -60.0}}, RoadClass::primary,
                       10.0});
  // Mirror symmetry about y=0 makes both integrals bitwise equal.
  const double e1 =
      oracle_concentration(one, {0.0, 0.0}, params) - params.background_ugm3;
  const double e2 =
      oracle_concentration(two, {0.0, 0.0}, params) - params.background_ugm3;
  CHECK(e2 == doctest::Approx(2.0 * e1).epsilon(1e-9));
}

TEST_CASE("single-source concentration is non-increasing along a ray") {
  const Scene scene = isolated_trunk_km();
  OracleParams params;
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const double d = 2.0 + i * 12.0;
    const double c = oracle_concentration(scene, {0.0, d}, params);
    CHECK(c <= prev + 1e-12);
    prev = c;
  }
}

TEST_CASE("additivity over disjoint source sets is exact") {
  OracleParams params;
  Scene a;
  a.roads.push_back({{{-100.0, 30.0}, {100.0, 35.0}}, RoadClass::local, 5.0});
  Scene b;
  b.zones.push_back(
      {{{50.0, 50.0}, {150.0, 50.0}, {150.0, 150.0}, {50.0, 150.0}},
       LandUseClass::industrial});
  Scene both = a;
  both.zones = b.zones;

  const Vec2 p{0.0, 0.0};
  const double ea = oracle_concentration(a, p, params) - params.background_ugm3;
  const double eb = oracle_concentration(b, p, params) - params.background_ugm3;
  const double eab =
      oracle_concentration(both, p, params) - params.background_ugm3;
  CHECK(eab == doctest::Approx(ea + eb).epsilon(1e-12));
}

TEST_CASE("industrial zones contribute a flat term inside") {
  OracleParams params;
  params.industrial_weight_ugm3 = 8.0;
  params.decay_m = 25.0;
  Scene scene;
  scene.zones.push_back(
      {{{-50.0, -50.0}, {50.0, -50.0}, {50.0, 50.0}, {-50.0, 50.0}},
       LandUseClass::industrial});
  CHECK(oracle_concentration(scene, {0.0, 0.0}, params) ==
        doctest::Approx(params.background_ugm3 + 8.0));
  // exp(-25/25) at 25 m beyond the boundary.
  CHECK(oracle_concentration(scene, {75.0, 0.0}, params) ==
        doctest::Approx(params.background_ugm3 + 8.0 * std::exp(-1.0))
            .epsilon(1e-9));
}

TEST_CASE("oracle stays at or above background") {
  const Scene scene = isolated_trunk_km();
  OracleParams params;
  for (double x : {-2000.0, -100.0, 0.0, 500.0, 4000.0}) {
    CHECK(oracle_concentration(scene, {x, 111.0}, params) >=
          params.background_ugm3);
  }
}

TEST_CASE("oracle rejects non-finite points") {
  Scene scene;
  OracleParams params;
  CHECK_THROWS_AS(oracle_concentration(
                      scene, {std::numeric_limits<double>::infinity(), 0.0},
                      params),
                  std::invalid_argument);
}
