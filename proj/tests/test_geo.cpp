#include <doctest.h>

#include <cmath>
#include <set>

#include "lurbench/errors.hpp"
#include "lurbench/geo.hpp"

using namespace lur;

TEST_CASE("meters_per_pixel matches closed-form evaluations") {
  // 0.75 m/px at zoom 17 around London's latitude.
  CHECK(meters_per_pixel(51.5, 17) == doctest::Approx(0.7435).epsilon(0.015));
  // Equator, zoom 0: C / 256.
  CHECK(meters_per_pixel(0.0, 0) ==
        doctest::Approx(156543.034).epsilon(1e-6));
  // C * cos(60 deg) / 2^25.
  CHECK(meters_per_pixel(60.0, 17) ==
        doctest::Approx(0.59715).epsilon(1e-4));
}

TEST_CASE("meters_per_pixel halves exactly per zoom step") {
  for (double lat : {0.0, 35.0, 51.5, -51.5, 80.0}) {
    for (int zoom = 0; zoom < 21; ++zoom) {
      const double ratio =
          meters_per_pixel(lat, zoom) / meters_per_pixel(lat, zoom + 1);
      CHECK(std::abs(ratio - 2.0) < 1e-12);
    }
  }
}

TEST_CASE("meters_per_pixel is even in latitude") {
  for (double lat : {0.1, 12.0, 45.0, 71.3}) {
    CHECK(meters_per_pixel(lat, 12) == meters_per_pixel(-lat, 12));
  }
}

TEST_CASE("meters_per_pixel rejects bad arguments") {
  CHECK_THROWS_AS(meters_per_pixel(86.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(meters_per_pixel(-86.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(meters_per_pixel(10.0, -1), std::invalid_argument);
  CHECK_THROWS_AS(meters_per_pixel(std::nan(""), 10), std::invalid_argument);
}

TEST_CASE("window_pixel_extent around the paper's settings") {
  GeoWindow w;
  w.center.lat_deg = 51.5;
  w.side_m = 80.0;
  w.zoom = 17;
  const int px = window_pixel_extent(w);
  CHECK(px >= 106);
  CHECK(px <= 108);

  w.center.lat_deg = 0.0;
  CHECK(window_pixel_extent(w) == 67);  // round(80 / 1.1943)

  w.center.lat_deg = 51.5;
  w.side_m = meters_per_pixel(51.5, 17);
  CHECK(window_pixel_extent(w) == 1);

  w.side_m = 0.0;
  CHECK_THROWS_AS(window_pixel_extent(w), std::invalid_argument);
}

TEST_CASE("tile_index formula evaluations") {
  CHECK(tile_index(0.0, 0.0, 0) == TileIndex{0, 0, 0});
  CHECK(tile_index(0.0, 0.0, 1) == TileIndex{1, 1, 1});
  // Independent evaluation of the slippy formula for central London.
  CHECK(tile_index(51.5074, -0.1278, 17) == TileIndex{17, 65489, 43584});
}

TEST_CASE("tile_index is monotone in longitude and latitude") {
  const int zoom = 10;
  int prev_x = -1;
  for (double lon = -179.0; lon <= 179.0; lon += 3.7) {
    const TileIndex t = tile_index(20.0, lon, zoom);
    CHECK(t.x >= prev_x);
    prev_x = t.x;
  }
  int prev_y = 1 << zoom;
  for (double lat = -84.0; lat <= 84.0; lat += 2.3) {
    const TileIndex t = tile_index(lat, 11.0, zoom);
    CHECK(t.y <= prev_y);
    prev_y = t.y;
  }
}

TEST_CASE("sample_nonoverlapping basic and geometric cases") {
  const BoundingBox small{0.0, 0.0, 400.0, 400.0};
  const auto one = sample_nonoverlapping(small, 1, 80.0, 7);
  REQUIRE(one.size() == 1);
  CHECK(one[0].x_m >= 0.0);
  CHECK(one[0].x_m <= 400.0);

  const BoundingBox tight{0.0, 0.0, 160.0, 80.0};
  const auto two = sample_nonoverlapping(tight, 2, 80.0, 11);
  REQUIRE(two.size() == 2);
  CHECK(chebyshev_distance(two[0], two[1]) >= 80.0);
}

TEST_CASE("sample_nonoverlapping at the paper's density passes the audit") {
  // Central London box: 8100 m x 5580 m, 4500 samples of 80 m squares.
  const BoundingBox box{0.0, 0.0, 8100.0, 5580.0};
  const auto pts = sample_nonoverlapping(box, 4500, 80.0, 123);
  REQUIRE(pts.size() == 4500);
  // Exhaustive pairwise Chebyshev check.
  int violations = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j) {
      if (chebyshev_distance(pts[i], pts[j]) < 80.0) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("sample_nonoverlapping is deterministic and reports capacity") {
  const BoundingBox box{0.0, 0.0, 1000.0, 1000.0};
  const auto a = sample_nonoverlapping(box, 50, 80.0, 99);
  const auto b = sample_nonoverlapping(box, 50, 80.0, 99);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x_m == b[i].x_m);
    CHECK(a[i].y_m == b[i].y_m);
  }

  // 200 squares of 80 m cannot fit into 400 m x 400 m.
  const BoundingBox impossible{0.0, 0.0, 400.0, 400.0};
  try {
    sample_nonoverlapping(impossible, 200, 80.0, 5);
    FAIL("expected CapacityError");
  } catch (const CapacityError& e) {
    CHECK(e.achieved() > 0);
    CHECK(e.achieved() < 200);
  }
}
