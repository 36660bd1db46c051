#pragma once

#include <cstdint>

#include "lurbench/scene.hpp"

namespace lur {

struct CityConfig {
  double width_m = 8100.0;
  double height_m = 5580.0;
  double block_m = 120.0;         // pitch of the local street grid
  double signal_fraction = 0.3;   // share of drivable intersections signalized
  double local_keep_prob = 0.75;  // chance a local grid street is drawn
  double zone_fill_prob = 0.85;   // chance a block carries an explicit zone
};

// Seeded procedural city: a jittered hierarchical street grid (motorway
// down to footpath), block land-use zones with clustered classes, traffic
// signals on a random subset of intersections, and premise anchors inside
// industrial zones. Guaranteed to contain every road and land-use class.
Scene generate_city(const CityConfig& config, std::uint64_t seed);

// Intersections of drivable (non-footpath) road centerlines, deduplicated
// within 1 m. Exposed for tests and diagnostics.
std::vector<Vec2> road_intersections(const Scene& scene);

}  // namespace lur
