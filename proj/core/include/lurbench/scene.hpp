#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lurbench/geom.hpp"

namespace lur {

enum class RoadClass : int {
  motorway = 0,
  trunk,
  primary,
  secondary,
  local,
  footpath,
};
inline constexpr int kNumRoadClasses = 6;

enum class LandUseClass : int {
  industrial = 0,
  residential,
  commercial,
  park,
  forest,
  water,
  neutral,
};
inline constexpr int kNumLandUseClasses = 7;

const char* to_string(RoadClass c);
const char* to_string(LandUseClass c);
RoadClass road_class_from_string(const std::string& s);
LandUseClass land_use_from_string(const std::string& s);

// Motorway, trunk, primary and secondary roads count as big streets; the
// rest are local streets.
bool is_big_street(RoadClass c);

// Default stroke width when rendering, in meters.
double default_road_width_m(RoadClass c);

enum class PointKind : int {
  traffic_signal = 0,
  industrial_premise_anchor,
};
const char* to_string(PointKind k);
PointKind point_kind_from_string(const std::string& s);

struct Road {
  Polyline points;  // >= 2 vertices, meters
  RoadClass cls = RoadClass::local;
  double width_m = 5.0;
};

struct Zone {
  Polygon points;  // simple polygon, meters
  LandUseClass cls = LandUseClass::neutral;
};

struct ScenePoint {
  Vec2 pos;
  PointKind kind = PointKind::traffic_signal;
};

// Vector description of a synthetic city. Immutable after construction;
// all consumers treat it as read-only.
struct Scene {
  std::vector<Road> roads;
  std::vector<Zone> zones;
  std::vector<ScenePoint> points;
  LandUseClass background = LandUseClass::neutral;

  Rect bounds() const;
};

struct Rgb {
  float r = 0.0f, g = 0.0f, b = 0.0f;
  bool operator==(const Rgb&) const = default;
};

// Color assignment for rasterization. Colors follow the hue families of
// default street-map rendering (big roads red/orange, parks green, water
// blue) with a guaranteed pairwise channel-wise separation of 0.1.
struct Palette {
  std::array<Rgb, kNumLandUseClasses> land{};
  std::array<Rgb, kNumRoadClasses> road{};

  Rgb of(LandUseClass c) const { return land[static_cast<int>(c)]; }
  Rgb of(RoadClass c) const { return road[static_cast<int>(c)]; }

  static Palette map_default();
  // Muted, earthy variant used by the synthetic satellite renderer.
  static Palette satellite_default();

  // Minimum pairwise L-inf separation across all 13 colors.
  double min_separation() const;
  // FNV-1a over the quantized color table; recorded in dataset metadata.
  std::uint64_t hash() const;
};

enum class ImageSemantics : int {
  map = 0,
  satellite_like,
  map_satellite,
};
const char* to_string(ImageSemantics s);
ImageSemantics image_semantics_from_string(const std::string& s);

// H x W x C raster with intensities in [0,1], planar channel layout
// (data[c*H*W + y*W + x]).
struct TileImage {
  int height = 0;
  int width = 0;
  int channels = 0;
  ImageSemantics semantics = ImageSemantics::map;
  std::vector<float> data;

  float& at(int c, int y, int x) {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
  float at(int c, int y, int x) const {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
  size_t pixel_count() const {
    return static_cast<size_t>(height) * width;
  }
};

TileImage make_image(int height, int width, int channels, ImageSemantics sem);

// Stacks the channels of a map tile and a satellite-like tile into one
// six-channel tensor.
TileImage concat_channels(const TileImage& map_img, const TileImage& sat_img);

// Ground-truth generator parameters: exponential distance-decay kernel
// exp(-d / decay_m) applied to road line sources and industrial zones.
struct OracleParams {
  double background_ugm3 = 32.0;
  std::array<double, kNumRoadClasses> road_weight_ugm3{1.2, 0.9, 0.55,
                                                       0.35, 0.12, 0.01};
  double industrial_weight_ugm3 = 10.0;
  double decay_m = 25.0;
};

// What a point of the scene resolves to after z-ordering: roads overprint
// zones, later list entries overprint earlier ones.
struct ResolvedEntity {
  bool is_road = false;
  RoadClass road = RoadClass::local;
  LandUseClass land = LandUseClass::neutral;
};

ResolvedEntity resolve_entity(const Scene& scene, const Vec2& p);

}  // namespace lur
