#include "lurbench/citygen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace lur {

namespace {

RoadClass grid_line_class(int index) {
  if (index % 24 == 0) return RoadClass::motorway;
  if (index % 12 == 0) return RoadClass::trunk;
  if (index % 6 == 0) return RoadClass::primary;
  if (index % 3 == 0) return RoadClass::secondary;
  return RoadClass::local;
}

Road make_grid_road(std::mt19937_64& rng, RoadClass cls, double at,
                    double span, bool vertical, double jitter_amp) {
  std::uniform_real_distribution<double> jitter(-jitter_amp, jitter_amp);
  Road road;
  road.cls = cls;
  road.width_m = default_road_width_m(cls);
  const int vertices = std::max(2, static_cast<int>(span / 300.0) + 1);
  for (int i = 0; i < vertices; ++i) {
    const double along = span * i / (vertices - 1);
    double cross = at;
    if (i != 0 && i != vertices - 1) cross += jitter(rng);
    if (vertical) {
      road.points.push_back({cross, along});
    } else {
      road.points.push_back({along, cross});
    }
  }
  return road;
}

struct ClusterField {
  std::vector<Vec2> centers;
  double sigma = 1.0;
  double amplitude = 1.0;
  double value(const Vec2& p) const {
    double best = 0.0;
    for (const auto& c : centers) {
      const double d2 = (p - c).dot(p - c);
      best = std::max(best, amplitude * std::exp(-d2 / (2.0 * sigma * sigma)));
    }
    return best;
  }
};

}  // namespace

Scene generate_city(const CityConfig& config, std::uint64_t seed) {
  const double area = config.width_m * config.height_m;
  if (area < 1e6) {
    throw std::invalid_argument("city area must be at least 1 km^2");
  }
  if (config.block_m <= 10.0) {
    throw std::invalid_argument("block pitch too small");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Scene scene;
  scene.background = LandUseClass::neutral;

  const double W = config.width_m;
  const double H = config.height_m;
  const double block = config.block_m;
  const int nx = static_cast<int>(W / block);
  const int ny = static_cast<int>(H / block);
  const double jitter_amp = 0.12 * block;

  const int shift_x = static_cast<int>(rng() % 24);
  const int shift_y = static_cast<int>(rng() % 24);

  // Street grid. Vertical lines first, then horizontal, then footpaths.
  for (int k = 1; k < nx; ++k) {
    const RoadClass cls = grid_line_class(k + shift_x);
    if (cls == RoadClass::local && unit(rng) > config.local_keep_prob)
      continue;
    scene.roads.push_back(make_grid_road(rng, cls, k * block, H, true,
                                         jitter_amp));
  }
  for (int k = 1; k < ny; ++k) {
    const RoadClass cls = grid_line_class(k + shift_y);
    if (cls == RoadClass::local && unit(rng) > config.local_keep_prob)
      continue;
    scene.roads.push_back(make_grid_road(rng, cls, k * block, W, false,
                                         jitter_amp));
  }

  const int n_paths = std::max(2, static_cast<int>(area / 1.5e5));
  for (int i = 0; i < n_paths; ++i) {
    Road path;
    path.cls = RoadClass::footpath;
    path.width_m = default_road_width_m(RoadClass::footpath);
    Vec2 p{unit(rng) * W, unit(rng) * H};
    double angle = unit(rng) * 2.0 * 3.14159265358979323846;
    path.points.push_back(p);
    const int segs = 2 + static_cast<int>(rng() % 3);
    for (int s = 0; s < segs; ++s) {
      angle += (unit(rng) - 0.5) * 1.2;
      const double len = 60.0 + unit(rng) * 90.0;
      p = {std::clamp(p.x + std::cos(angle) * len, 0.0, W),
           std::clamp(p.y + std::sin(angle) * len, 0.0, H)};
      path.points.push_back(p);
    }
    scene.roads.push_back(std::move(path));
  }

  // Postcondition: at least one road of every class.
  for (int c = 0; c < kNumRoadClasses; ++c) {
    const auto cls = static_cast<RoadClass>(c);
    if (std::any_of(scene.roads.begin(), scene.roads.end(),
                    [&](const Road& r) { return r.cls == cls; }))
      continue;
    const double y = (0.2 + 0.6 * unit(rng)) * H;
    Road r = make_grid_road(rng, cls, y, W, false, jitter_amp);
    scene.roads.push_back(std::move(r));
  }

  // Land-use fields: commercial core, industrial clusters along motorways,
  // green and water pockets; residential is the default fabric.
  ClusterField commercial{{Vec2{W * 0.5, H * 0.5}}, 0.14 * std::min(W, H),
                          1.0};
  std::vector<Vec2> industrial_centers;
  std::vector<const Road*> motorways;
  for (const auto& r : scene.roads) {
    if (r.cls == RoadClass::motorway) motorways.push_back(&r);
  }
  const int n_ind = 2 + static_cast<int>(rng() % 3);
  for (int i = 0; i < n_ind; ++i) {
    if (!motorways.empty()) {
      const Road& m = *motorways[rng() % motorways.size()];
      const auto& v = m.points[rng() % m.points.size()];
      industrial_centers.push_back(
          {std::clamp(v.x + (unit(rng) - 0.5) * 600.0, 0.0, W),
           std::clamp(v.y + (unit(rng) - 0.5) * 600.0, 0.0, H)});
    } else {
      industrial_centers.push_back({unit(rng) * W, unit(rng) * H});
    }
  }
  ClusterField industrial{industrial_centers, 0.09 * std::min(W, H), 1.15};

  std::vector<Vec2> park_centers, forest_centers, water_centers;
  const int n_park = std::max(3, static_cast<int>(area / 6e6));
  for (int i = 0; i < n_park; ++i)
    park_centers.push_back({unit(rng) * W, unit(rng) * H});
  for (int i = 0; i < 3; ++i) {
    // Forest and water hug the fringes.
    const double edge_x = unit(rng) < 0.5 ? unit(rng) * 0.2 * W
                                          : W * (0.8 + unit(rng) * 0.2);
    forest_centers.push_back({edge_x, unit(rng) * H});
  }
  water_centers.push_back({unit(rng) * W, unit(rng) < 0.5
                                              ? unit(rng) * 0.15 * H
                                              : H * (0.85 + unit(rng) * 0.15)});
  ClusterField park{park_centers, 0.045 * std::min(W, H), 1.0};
  ClusterField forest{forest_centers, 0.07 * std::min(W, H), 0.95};
  ClusterField water{water_centers, 0.05 * std::min(W, H), 1.3};

  const double inset = std::clamp(0.08 * block, 4.0, 15.0);
  for (int bx = 0; bx < nx; ++bx) {
    for (int by = 0; by < ny; ++by) {
      if (unit(rng) > config.zone_fill_prob) continue;
      const Vec2 center{(bx + 0.5) * block, (by + 0.5) * block};
      struct Scored {
        LandUseClass cls;
        double score;
      };
      const double noise = 0.12;
      Scored scores[6] = {
          {LandUseClass::commercial, commercial.value(center)},
          {LandUseClass::industrial, industrial.value(center)},
          {LandUseClass::park, park.value(center)},
          {LandUseClass::forest, forest.value(center)},
          {LandUseClass::water, water.value(center)},
          {LandUseClass::residential, 0.42},
      };
      Scored best{LandUseClass::residential, -1.0};
      for (auto& s : scores) {
        s.score += noise * unit(rng);
        if (s.score > best.score) best = s;
      }
      Zone z;
      z.cls = best.cls;
      const double x0 = bx * block + inset;
      const double x1 = (bx + 1) * block - inset;
      const double y0 = by * block + inset;
      const double y1 = (by + 1) * block - inset;
      z.points = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
      scene.zones.push_back(std::move(z));
    }
  }

  // Postcondition: every land-use class appears as an explicit zone.
  for (int c = 0; c < kNumLandUseClasses; ++c) {
    const auto cls = static_cast<LandUseClass>(c);
    if (std::any_of(scene.zones.begin(), scene.zones.end(),
                    [&](const Zone& z) { return z.cls == cls; }))
      continue;
    if (scene.zones.empty()) break;
    scene.zones[rng() % scene.zones.size()].cls = cls;
  }

  // Signals at a seeded subset of drivable intersections.
  for (const auto& p : road_intersections(scene)) {
    if (unit(rng) < config.signal_fraction) {
      scene.points.push_back({p, PointKind::traffic_signal});
    }
  }
  for (const auto& z : scene.zones) {
    if (z.cls != LandUseClass::industrial) continue;
    Vec2 c{0.0, 0.0};
    for (const auto& v : z.points) c = c + v;
    c = c * (1.0 / z.points.size());
    scene.points.push_back({c, PointKind::industrial_premise_anchor});
  }
  return scene;
}

std::vector<Vec2> road_intersections(const Scene& scene) {
  std::vector<Vec2> out;
  std::vector<const Road*> drivable;
  for (const auto& r : scene.roads) {
    if (r.cls != RoadClass::footpath) drivable.push_back(&r);
  }
  std::vector<Rect> road_bounds;
  road_bounds.reserve(drivable.size());
  for (const auto* r : drivable) road_bounds.push_back(bounds_of(r->points));

  for (size_t i = 0; i < drivable.size(); ++i) {
    for (size_t j = i + 1; j < drivable.size(); ++j) {
      if (!road_bounds[i].intersects(road_bounds[j])) continue;
      const auto& a = drivable[i]->points;
      const auto& b = drivable[j]->points;
      for (size_t si = 0; si + 1 < a.size(); ++si) {
        for (size_t sj = 0; sj + 1 < b.size(); ++sj) {
          Vec2 x;
          if (segment_intersection(a[si], a[si + 1], b[sj], b[sj + 1], &x)) {
            bool dup = false;
            for (const auto& q : out) {
              if ((q - x).norm() < 1.0) {
                dup = true;
                break;
              }
            }
            if (!dup) out.push_back(x);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace lur
