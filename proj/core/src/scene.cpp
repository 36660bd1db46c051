#include "lurbench/scene.hpp"

#include <cmath>
#include <stdexcept>

#include "lurbench/errors.hpp"

namespace lur {

const char* to_string(RoadClass c) {
  switch (c) {
    case RoadClass::motorway: return "motorway";
    case RoadClass::trunk: return "trunk";
    case RoadClass::primary: return "primary";
    case RoadClass::secondary: return "secondary";
    case RoadClass::local: return "local";
    case RoadClass::footpath: return "footpath";
  }
  return "?";
}

const char* to_string(LandUseClass c) {
  switch (c) {
    case LandUseClass::industrial: return "industrial";
    case LandUseClass::residential: return "residential";
    case LandUseClass::commercial: return "commercial";
    case LandUseClass::park: return "park";
    case LandUseClass::forest: return "forest";
    case LandUseClass::water: return "water";
    case LandUseClass::neutral: return "neutral";
  }
  return "?";
}

const char* to_string(PointKind k) {
  switch (k) {
    case PointKind::traffic_signal: return "traffic_signal";
    case PointKind::industrial_premise_anchor:
      return "industrial_premise_anchor";
  }
  return "?";
}

const char* to_string(ImageSemantics s) {
  switch (s) {
    case ImageSemantics::map: return "map";
    case ImageSemantics::satellite_like: return "satellite-like";
    case ImageSemantics::map_satellite: return "map+satellite";
  }
  return "?";
}

RoadClass road_class_from_string(const std::string& s) {
  for (int i = 0; i < kNumRoadClasses; ++i) {
    if (s == to_string(static_cast<RoadClass>(i)))
      return static_cast<RoadClass>(i);
  }
  throw std::invalid_argument("unknown road class: " + s);
}

LandUseClass land_use_from_string(const std::string& s) {
  for (int i = 0; i < kNumLandUseClasses; ++i) {
    if (s == to_string(static_cast<LandUseClass>(i)))
      return static_cast<LandUseClass>(i);
  }
  throw std::invalid_argument("unknown land-use class: " + s);
}

PointKind point_kind_from_string(const std::string& s) {
  if (s == "traffic_signal") return PointKind::traffic_signal;
  if (s == "industrial_premise_anchor")
    return PointKind::industrial_premise_anchor;
  throw std::invalid_argument("unknown point kind: " + s);
}

ImageSemantics image_semantics_from_string(const std::string& s) {
  if (s == "map") return ImageSemantics::map;
  if (s == "satellite-like") return ImageSemantics::satellite_like;
  if (s == "map+satellite") return ImageSemantics::map_satellite;
  throw std::invalid_argument("unknown image semantics: " + s);
}

bool is_big_street(RoadClass c) {
  return c == RoadClass::motorway || c == RoadClass::trunk ||
         c == RoadClass::primary || c == RoadClass::secondary;
}

double default_road_width_m(RoadClass c) {
  switch (c) {
    case RoadClass::motorway: return 18.0;
    case RoadClass::trunk: return 14.0;
    case RoadClass::primary: return 10.0;
    case RoadClass::secondary: return 8.0;
    case RoadClass::local: return 5.0;
    case RoadClass::footpath: return 2.0;
  }
  return 5.0;
}

Rect Scene::bounds() const {
  Rect r{0.0, 0.0, 0.0, 0.0};
  bool first = true;
  auto merge = [&](const Rect& b) {
    if (first) {
      r = b;
      first = false;
    } else {
      r.min_x = std::min(r.min_x, b.min_x);
      r.min_y = std::min(r.min_y, b.min_y);
      r.max_x = std::max(r.max_x, b.max_x);
      r.max_y = std::max(r.max_y, b.max_y);
    }
  };
  for (const auto& road : roads) merge(bounds_of(road.points));
  for (const auto& zone : zones) merge(bounds_of(zone.points));
  for (const auto& pt : points)
    merge(Rect{pt.pos.x, pt.pos.y, pt.pos.x, pt.pos.y});
  return r;
}

Palette Palette::map_default() {
  Palette p;
  p.land[static_cast<int>(LandUseClass::industrial)] = {0.78f, 0.68f, 0.82f};
  p.land[static_cast<int>(LandUseClass::residential)] = {0.82f, 0.82f, 0.80f};
  p.land[static_cast<int>(LandUseClass::commercial)] = {0.96f, 0.80f, 0.70f};
  p.land[static_cast<int>(LandUseClass::park)] = {0.68f, 0.90f, 0.64f};
  p.land[static_cast<int>(LandUseClass::forest)] = {0.52f, 0.74f, 0.48f};
  p.land[static_cast<int>(LandUseClass::water)] = {0.58f, 0.78f, 0.94f};
  p.land[static_cast<int>(LandUseClass::neutral)] = {0.94f, 0.92f, 0.87f};
  p.road[static_cast<int>(RoadClass::motorway)] = {0.89f, 0.28f, 0.25f};
  p.road[static_cast<int>(RoadClass::trunk)] = {0.96f, 0.56f, 0.22f};
  p.road[static_cast<int>(RoadClass::primary)] = {0.99f, 0.82f, 0.42f};
  p.road[static_cast<int>(RoadClass::secondary)] = {0.97f, 0.97f, 0.58f};
  p.road[static_cast<int>(RoadClass::local)] = {1.00f, 1.00f, 1.00f};
  p.road[static_cast<int>(RoadClass::footpath)] = {0.82f, 0.46f, 0.38f};
  return p;
}

Palette Palette::satellite_default() {
  // Blend every map color toward an earthy grey-green and darken. The
  // separation invariant is relaxed deliberately; satellite-like tiles get
  // their contrast broken further by per-pixel noise.
  Palette base = map_default();
  Palette p;
  const Rgb anchor{0.35f, 0.37f, 0.30f};
  auto mute = [&](Rgb c) {
    return Rgb{0.45f * c.r + 0.55f * anchor.r, 0.45f * c.g + 0.55f * anchor.g,
               0.45f * c.b + 0.55f * anchor.b};
  };
  for (int i = 0; i < kNumLandUseClasses; ++i) p.land[i] = mute(base.land[i]);
  for (int i = 0; i < kNumRoadClasses; ++i) p.road[i] = mute(base.road[i]);
  // Asphalt reads darker than muted map strokes.
  p.road[static_cast<int>(RoadClass::motorway)] = {0.32f, 0.32f, 0.34f};
  p.road[static_cast<int>(RoadClass::trunk)] = {0.36f, 0.35f, 0.36f};
  p.road[static_cast<int>(RoadClass::primary)] = {0.40f, 0.39f, 0.40f};
  p.road[static_cast<int>(RoadClass::secondary)] = {0.44f, 0.43f, 0.43f};
  p.road[static_cast<int>(RoadClass::local)] = {0.50f, 0.49f, 0.48f};
  return p;
}

double Palette::min_separation() const {
  std::vector<Rgb> all;
  for (const auto& c : land) all.push_back(c);
  for (const auto& c : road) all.push_back(c);
  double best = 1.0;
  for (size_t i = 0; i < all.size(); ++i) {
    for (size_t j = i + 1; j < all.size(); ++j) {
      double d = std::max({std::abs(all[i].r - all[j].r),
                           std::abs(all[i].g - all[j].g),
                           std::abs(all[i].b - all[j].b)});
      best = std::min(best, d);
    }
  }
  return best;
}

std::uint64_t Palette::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](float v) {
    auto q = static_cast<std::uint64_t>(std::lround(v * 255.0f)) & 0xFF;
    h ^= q;
    h *= 1099511628211ULL;
  };
  for (const auto& c : land) {
    mix(c.r);
    mix(c.g);
    mix(c.b);
  }
  for (const auto& c : road) {
    mix(c.r);
    mix(c.g);
    mix(c.b);
  }
  return h;
}

TileImage make_image(int height, int width, int channels, ImageSemantics sem) {
  if (height <= 0 || width <= 0) throw ShapeError("image extents must be > 0");
  if (channels != 3 && channels != 6)
    throw ShapeError("channels must be 3 or 6");
  if (channels == 6 && sem != ImageSemantics::map_satellite)
    throw ShapeError("six channels imply map+satellite semantics");
  TileImage img;
  img.height = height;
  img.width = width;
  img.channels = channels;
  img.semantics = sem;
  img.data.assign(static_cast<size_t>(height) * width * channels, 0.0f);
  return img;
}

TileImage concat_channels(const TileImage& map_img, const TileImage& sat_img) {
  if (map_img.height != sat_img.height || map_img.width != sat_img.width)
    throw ShapeError("channel concat requires matching extents");
  if (map_img.channels != 3 || sat_img.channels != 3)
    throw ShapeError("channel concat expects two RGB images");
  TileImage out = make_image(map_img.height, map_img.width, 6,
                             ImageSemantics::map_satellite);
  const size_t plane = map_img.pixel_count() * 3;
  std::copy(map_img.data.begin(), map_img.data.end(), out.data.begin());
  std::copy(sat_img.data.begin(), sat_img.data.end(),
            out.data.begin() + static_cast<std::ptrdiff_t>(plane));
  return out;
}

ResolvedEntity resolve_entity(const Scene& scene, const Vec2& p) {
  // Roads overprint zones; among roads and among zones the later list
  // entry wins.
  for (auto it = scene.roads.rbegin(); it != scene.roads.rend(); ++it) {
    if (dist_point_polyline(p, it->points) <= it->width_m * 0.5) {
      return ResolvedEntity{true, it->cls, scene.background};
    }
  }
  for (auto it = scene.zones.rbegin(); it != scene.zones.rend(); ++it) {
    if (point_in_polygon(p, it->points)) {
      return ResolvedEntity{false, RoadClass::local, it->cls};
    }
  }
  return ResolvedEntity{false, RoadClass::local, scene.background};
}

}  // namespace lur
