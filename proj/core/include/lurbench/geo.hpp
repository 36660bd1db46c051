#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lur {

inline constexpr double kMercatorMaxLatDeg = 85.0511;
// Equatorial circumference used by the standard Web-Mercator ground
// resolution formula, in meters.
inline constexpr double kEarthCircumferenceM = 40075016.686;

// A location in a locally metric planar frame. Latitude is carried
// separately because only the Mercator pixel scale needs it.
struct GeoPoint {
  double x_m = 0.0;
  double y_m = 0.0;
  double lat_deg = 0.0;
  std::string crs_tag = "local-metric";
};

// Axis-aligned square footprint of one image.
struct GeoWindow {
  GeoPoint center;
  double side_m = 80.0;
  int zoom = 17;
};

// Slippy-map tile address.
struct TileIndex {
  int z = 0;
  int x = 0;
  int y = 0;
  bool operator==(const TileIndex&) const = default;
};

struct BoundingBox {
  double min_x_m = 0.0;
  double min_y_m = 0.0;
  double max_x_m = 0.0;
  double max_y_m = 0.0;
  double width() const { return max_x_m - min_x_m; }
  double height() const { return max_y_m - min_y_m; }
};

// Ground resolution of a Web-Mercator tile pyramid at `zoom`, in meters
// per pixel. Halves exactly per zoom step.
double meters_per_pixel(double lat_deg, int zoom);

// Number of pixels a square window of side_m covers at its zoom level,
// rounded half-up.
int window_pixel_extent(const GeoWindow& window);

// z/x/y address of the tile containing (lat, lon).
TileIndex tile_index(double lat_deg, double lon_deg, int zoom);

// Places `n` points uniformly in `bbox` so that the axis-aligned squares
// of side `side_m` centered on them are pairwise disjoint (Chebyshev
// center distance >= side_m). Rejection sampling, budget 1000*n proposals.
// Throws CapacityError with the achieved count when the budget runs out.
std::vector<GeoPoint> sample_nonoverlapping(const BoundingBox& bbox, int n,
                                            double side_m,
                                            std::uint64_t seed,
                                            double lat_deg = 0.0);

double chebyshev_distance(const GeoPoint& a, const GeoPoint& b);

}  // namespace lur
