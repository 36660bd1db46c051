#include "lurbench/features.hpp"

#include <cmath>
#include <stdexcept>

namespace lur {

const std::array<std::string, kNumFeatures>& feature_names() {
  static const std::array<std::string, kNumFeatures> names = {
      "area_industrial_50m",  "area_industrial_100m",
      "area_commercial_50m",  "area_commercial_100m",
      "area_residential_50m", "area_residential_100m",
      "length_big_50m",       "length_big_100m",
      "length_local_50m",     "length_local_100m",
      "dist_traffic_signal",  "dist_motorway",
      "dist_primary_road",    "dist_industrial_premise",
  };
  return names;
}

double buffer_area(const Scene& scene, const Vec2& center, LandUseClass cls,
                   double r) {
  if (r <= 0.0) throw std::invalid_argument("buffer radius must be positive");
  const Polygon disk = disk_polygon(center, r);
  const Rect disk_bounds{center.x - r, center.y - r, center.x + r,
                         center.y + r};
  double area = 0.0;
  for (const auto& zone : scene.zones) {
    if (zone.cls != cls) continue;
    if (!bounds_of(zone.points).intersects(disk_bounds)) continue;
    const Polygon clipped = clip_polygon_convex(zone.points, disk);
    if (clipped.size() >= 3) area += polygon_area(clipped);
  }
  return area;
}

double buffer_length(const Scene& scene, const Vec2& center, StreetSet set,
                     double r) {
  if (r <= 0.0) throw std::invalid_argument("buffer radius must be positive");
  const Rect disk_bounds{center.x - r, center.y - r, center.x + r,
                         center.y + r};
  double length = 0.0;
  for (const auto& road : scene.roads) {
    const bool big = is_big_street(road.cls);
    if ((set == StreetSet::big) != big) continue;
    if (!bounds_of(road.points).intersects(disk_bounds)) continue;
    for (size_t i = 0; i + 1 < road.points.size(); ++i) {
      length += segment_length_in_disk(road.points[i], road.points[i + 1],
                                       center, r);
    }
  }
  return length;
}

double nearest_distance(const Scene& scene, const Vec2& center,
                        NearestKind kind) {
  double best = kAbsentEntityDistanceM;
  switch (kind) {
    case NearestKind::traffic_signal:
      for (const auto& p : scene.points) {
        if (p.kind != PointKind::traffic_signal) continue;
        best = std::min(best, (p.pos - center).norm());
      }
      break;
    case NearestKind::motorway:
    case NearestKind::primary_road: {
      const RoadClass want = kind == NearestKind::motorway
                                 ? RoadClass::motorway
                                 : RoadClass::primary;
      for (const auto& road : scene.roads) {
        if (road.cls != want) continue;
        best = std::min(best, dist_point_polyline(center, road.points));
      }
      break;
    }
    case NearestKind::industrial_premise:
      // Premises are encoded as industrial zones; 0 from inside.
      for (const auto& zone : scene.zones) {
        if (zone.cls != LandUseClass::industrial) continue;
        best = std::min(best, dist_point_polygon(center, zone.points));
        if (best == 0.0) break;
      }
      break;
  }
  return std::min(best, kAbsentEntityDistanceM);
}

FeatureVector feature_vector(const Scene& scene, const Vec2& center) {
  FeatureVector f;
  int i = 0;
  for (const auto cls : {LandUseClass::industrial, LandUseClass::commercial,
                         LandUseClass::residential}) {
    f[i++] = buffer_area(scene, center, cls, 50.0);
    f[i++] = buffer_area(scene, center, cls, 100.0);
  }
  for (const auto set : {StreetSet::big, StreetSet::local}) {
    f[i++] = buffer_length(scene, center, set, 50.0);
    f[i++] = buffer_length(scene, center, set, 100.0);
  }
  f[i++] = nearest_distance(scene, center, NearestKind::traffic_signal);
  f[i++] = nearest_distance(scene, center, NearestKind::motorway);
  f[i++] = nearest_distance(scene, center, NearestKind::primary_road);
  f[i++] = nearest_distance(scene, center, NearestKind::industrial_premise);
  return f;
}

}  // namespace lur
