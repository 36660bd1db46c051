#include <doctest.h>

#include <cmath>
#include <random>

#include "lurbench/citygen.hpp"
#include "lurbench/features.hpp"

using namespace lur;

namespace {

constexpr double kPi = 3.14159265358979323846;

Zone rect_zone(double x0, double y0, double x1, double y1, LandUseClass cls) {
  return Zone{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, cls};
}

// Monte-Carlo area oracle: fraction of disk points inside polygons.
double mc_area(const Scene& scene, const Vec2& c, LandUseClass cls, double r,
               int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-r, r);
  long hits = 0, in_disk = 0;
  for (int i = 0; i < n; ++i) {
    const double dx = u(rng), dy = u(rng);
    if (dx * dx + dy * dy > r * r) continue;
    ++in_disk;
    const Vec2 p{c.x + dx, c.y + dy};
    for (const auto& z : scene.zones) {
      if (z.cls == cls && point_in_polygon(p, z.points)) {
        ++hits;
        break;
      }
    }
  }
  return kPi * r * r * static_cast<double>(hits) /
         static_cast<double>(in_disk);
}

}  // namespace

TEST_CASE("buffer_area: full cover, absence, half-plane") {
  Scene scene;
  scene.zones.push_back(rect_zone(-500, -500, 500, 500,
                                  LandUseClass::commercial));
  const Vec2 c{0.0, 0.0};

  const double full = buffer_area(scene, c, LandUseClass::commercial, 50.0);
  CHECK(full == doctest::Approx(kPi * 2500.0).epsilon(0.005));

  CHECK(buffer_area(scene, c, LandUseClass::park, 50.0) == 0.0);

  // Half-plane x >= 0 as a huge rectangle.
  Scene half;
  half.zones.push_back(rect_zone(0, -5000, 5000, 5000,
                                 LandUseClass::industrial));
  const double observed = buffer_area(half, c, LandUseClass::industrial, 50.0);
  CHECK(observed == doctest::Approx(kPi * 2500.0 / 2.0).epsilon(0.005));
  // Monte-Carlo oracle agreement.
  const double mc = mc_area(half, c, LandUseClass::industrial, 50.0, 1000000,
                            99);
  CHECK(observed == doctest::Approx(mc).epsilon(0.01));
}

TEST_CASE("buffer_length chord cases") {
  Scene scene;
  scene.roads.push_back(
      {{{-200.0, 0.0}, {200.0, 0.0}}, RoadClass::trunk, 14.0});
  const Vec2 c{0.0, 0.0};
  CHECK(buffer_length(scene, c, StreetSet::big, 50.0) ==
        doctest::Approx(100.0).epsilon(1e-9));
  CHECK(buffer_length(scene, c, StreetSet::local, 50.0) == 0.0);

  // Offset chord: 2 sqrt(r^2 - d^2) = 80 m at r=50, d=30.
  Scene offset;
  offset.roads.push_back(
      {{{-200.0, 30.0}, {200.0, 30.0}}, RoadClass::motorway, 18.0});
  CHECK(buffer_length(offset, c, StreetSet::big, 50.0) ==
        doctest::Approx(80.0).epsilon(0.1 / 80.0));

  // Entirely outside the disk.
  Scene outside;
  outside.roads.push_back(
      {{{-200.0, 80.0}, {200.0, 80.0}}, RoadClass::local, 5.0});
  CHECK(buffer_length(outside, c, StreetSet::local, 50.0) == 0.0);
}

TEST_CASE("big-street set matches the class definition") {
  CHECK(is_big_street(RoadClass::motorway));
  CHECK(is_big_street(RoadClass::trunk));
  CHECK(is_big_street(RoadClass::primary));
  CHECK(is_big_street(RoadClass::secondary));
  CHECK(!is_big_street(RoadClass::local));
  CHECK(!is_big_street(RoadClass::footpath));
}

TEST_CASE("nearest_distance point, inside-polygon, and cap cases") {
  Scene scene;
  scene.points.push_back({{0.0, 37.0}, PointKind::traffic_signal});
  const Vec2 c{0.0, 0.0};
  CHECK(nearest_distance(scene, c, NearestKind::traffic_signal) ==
        doctest::Approx(37.0));

  scene.zones.push_back(rect_zone(-10, -10, 10, 10, LandUseClass::industrial));
  CHECK(nearest_distance(scene, c, NearestKind::industrial_premise) == 0.0);

  // No motorway anywhere: capped.
  CHECK(nearest_distance(scene, c, NearestKind::motorway) ==
        kAbsentEntityDistanceM);

  scene.roads.push_back(
      {{{100.0, -50.0}, {100.0, 50.0}}, RoadClass::motorway, 18.0});
  CHECK(nearest_distance(scene, c, NearestKind::motorway) ==
        doctest::Approx(100.0));
}

TEST_CASE("feature_vector on empty and simple scenes") {
  Scene empty;
  const FeatureVector fe = feature_vector(empty, {0.0, 0.0});
  for (int i = 0; i < 10; ++i) CHECK(fe[i] == 0.0);
  for (int i = 10; i < kNumFeatures; ++i)
    CHECK(fe[i] == kAbsentEntityDistanceM);

  Scene chord;
  chord.roads.push_back(
      {{{-200.0, 0.0}, {200.0, 0.0}}, RoadClass::trunk, 14.0});
  const FeatureVector fc = feature_vector(chord, {0.0, 0.0});
  CHECK(fc[6] == doctest::Approx(100.0));  // length_big_50m
  CHECK(fc[8] == 0.0);                     // length_local_50m
}

TEST_CASE("buffered features are monotone in radius") {
  const Scene scene = generate_city(CityConfig{2500.0, 2000.0}, 21);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ux(200.0, 2300.0);
  std::uniform_real_distribution<double> uy(200.0, 1800.0);
  for (int i = 0; i < 20; ++i) {
    const Vec2 c{ux(rng), uy(rng)};
    for (auto cls : {LandUseClass::industrial, LandUseClass::residential}) {
      CHECK(buffer_area(scene, c, cls, 50.0) <=
            buffer_area(scene, c, cls, 100.0) + 1e-9);
    }
    for (auto set : {StreetSet::big, StreetSet::local}) {
      CHECK(buffer_length(scene, c, set, 50.0) <=
            buffer_length(scene, c, set, 100.0) + 1e-9);
    }
  }
}

TEST_CASE("disk partition property via grid classification") {
  // Generated zones never overlap, so per-class areas plus background
  // must tile the disk.
  const Scene scene = generate_city(CityConfig{2500.0, 2000.0}, 8);
  const double r = 100.0;
  for (const Vec2 c : {Vec2{700.0, 700.0}, Vec2{1200.0, 900.0}}) {
    double class_total = 0.0;
    for (int k = 0; k < kNumLandUseClasses; ++k) {
      class_total += buffer_area(scene, c, static_cast<LandUseClass>(k), r);
    }
    // Grid samples resolve unzoned points (0.5 m grid over the disk).
    long in_disk = 0, background = 0;
    for (double x = c.x - r; x <= c.x + r; x += 0.5) {
      for (double y = c.y - r; y <= c.y + r; y += 0.5) {
        if ((x - c.x) * (x - c.x) + (y - c.y) * (y - c.y) > r * r) continue;
        ++in_disk;
        bool zoned = false;
        for (const auto& z : scene.zones) {
          if (point_in_polygon({x, y}, z.points)) {
            zoned = true;
            break;
          }
        }
        if (!zoned) ++background;
      }
    }
    const double bg_area = kPi * r * r * static_cast<double>(background) /
                           static_cast<double>(in_disk);
    CHECK(class_total + bg_area ==
          doctest::Approx(kPi * r * r).epsilon(0.01));
  }
}

TEST_CASE("rigid translation leaves features unchanged") {
  Scene scene;
  scene.zones.push_back(rect_zone(-40, -20, 35, 60, LandUseClass::residential));
  scene.roads.push_back({{{-90.0, 10.0}, {80.0, 15.0}}, RoadClass::primary,
                         10.0});
  scene.points.push_back({{12.0, -33.0}, PointKind::traffic_signal});

  const double shift = 1024.0;
  Scene moved = scene;
  for (auto& z : moved.zones)
    for (auto& p : z.points) p = {p.x + shift, p.y + shift};
  for (auto& r : moved.roads)
    for (auto& p : r.points) p = {p.x + shift, p.y + shift};
  for (auto& pt : moved.points)
    pt.pos = {pt.pos.x + shift, pt.pos.y + shift};

  const FeatureVector a = feature_vector(scene, {3.0, 4.0});
  const FeatureVector b = feature_vector(moved, {3.0 + shift, 4.0 + shift});
  for (int i = 0; i < kNumFeatures; ++i) {
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
  }
}

TEST_CASE("cross-check feature vector against per-feature recomputation") {
  const Scene scene = generate_city(CityConfig{2500.0, 2000.0}, 33);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(150.0, 2350.0);
  std::uniform_real_distribution<double> uy(150.0, 1850.0);
  for (int i = 0; i < 100; ++i) {
    const Vec2 c{ux(rng), uy(rng)};
    const FeatureVector f = feature_vector(scene, c);
    CHECK(f[0] == buffer_area(scene, c, LandUseClass::industrial, 50.0));
    CHECK(f[3] == buffer_area(scene, c, LandUseClass::commercial, 100.0));
    CHECK(f[7] == buffer_length(scene, c, StreetSet::big, 100.0));
    CHECK(f[10] == nearest_distance(scene, c, NearestKind::traffic_signal));
    CHECK(f[13] ==
          nearest_distance(scene, c, NearestKind::industrial_premise));
  }
}
