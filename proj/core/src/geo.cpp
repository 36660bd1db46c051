#include "lurbench/geo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "lurbench/errors.hpp"

namespace lur {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_lat(double lat_deg) {
  if (!(std::abs(lat_deg) <= kMercatorMaxLatDeg)) {
    throw std::invalid_argument("latitude outside Mercator bounds: " +
                                std::to_string(lat_deg));
  }
}
}  // namespace

double meters_per_pixel(double lat_deg, int zoom) {
  check_lat(lat_deg);
  if (zoom < 0) throw std::invalid_argument("zoom must be >= 0");
  return kEarthCircumferenceM * std::cos(lat_deg * kPi / 180.0) /
         std::pow(2.0, zoom + 8);
}

int window_pixel_extent(const GeoWindow& window) {
  if (window.side_m <= 0.0) {
    throw std::invalid_argument("window side must be positive");
  }
  double mpp = meters_per_pixel(window.center.lat_deg, window.zoom);
  int px = static_cast<int>(std::floor(window.side_m / mpp + 0.5));
  return std::max(px, 1);
}

TileIndex tile_index(double lat_deg, double lon_deg, int zoom) {
  check_lat(lat_deg);
  if (zoom < 0) throw std::invalid_argument("zoom must be >= 0");
  const double n = std::pow(2.0, zoom);
  const double phi = lat_deg * kPi / 180.0;
  int x = static_cast<int>(std::floor((lon_deg + 180.0) / 360.0 * n));
  int y = static_cast<int>(
      std::floor((1.0 - std::log(std::tan(phi) + 1.0 / std::cos(phi)) / kPi) /
                 2.0 * n));
  const int hi = static_cast<int>(n) - 1;
  return TileIndex{zoom, std::clamp(x, 0, hi), std::clamp(y, 0, hi)};
}

double chebyshev_distance(const GeoPoint& a, const GeoPoint& b) {
  return std::max(std::abs(a.x_m - b.x_m), std::abs(a.y_m - b.y_m));
}

std::vector<GeoPoint> sample_nonoverlapping(const BoundingBox& bbox, int n,
                                            double side_m, std::uint64_t seed,
                                            double lat_deg) {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  if (side_m <= 0.0) throw std::invalid_argument("side_m must be positive");
  if (bbox.width() <= 0.0 || bbox.height() <= 0.0) {
    throw std::invalid_argument("degenerate bounding box");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(bbox.min_x_m, bbox.max_x_m);
  std::uniform_real_distribution<double> uy(bbox.min_y_m, bbox.max_y_m);

  // Uniform grid over bbox with cell size side_m: any point conflicts only
  // with occupants of its own and the 8 neighboring cells.
  const int gx = std::max(1, static_cast<int>(bbox.width() / side_m));
  const int gy = std::max(1, static_cast<int>(bbox.height() / side_m));
  std::vector<std::vector<int>> cells(static_cast<size_t>(gx) * gy);
  auto cell_of = [&](double x, double y) {
    int cx = std::min(gx - 1, static_cast<int>((x - bbox.min_x_m) / side_m));
    int cy = std::min(gy - 1, static_cast<int>((y - bbox.min_y_m) / side_m));
    return std::pair<int, int>{cx, cy};
  };

  std::vector<GeoPoint> out;
  out.reserve(n);
  const std::uint64_t budget = 1000ULL * static_cast<std::uint64_t>(n);
  std::uint64_t attempts = 0;
  while (static_cast<int>(out.size()) < n) {
    if (attempts++ >= budget) {
      throw CapacityError(
          "placement budget exhausted after " + std::to_string(budget) +
              " attempts; placed " + std::to_string(out.size()) + " of " +
              std::to_string(n),
          static_cast<int>(out.size()));
    }
    const double x = ux(rng);
    const double y = uy(rng);
    auto [cx, cy] = cell_of(x, y);
    bool ok = true;
    for (int dy = -1; dy <= 1 && ok; ++dy) {
      for (int dx = -1; dx <= 1 && ok; ++dx) {
        int nx = cx + dx, ny = cy + dy;
        if (nx < 0 || ny < 0 || nx >= gx || ny >= gy) continue;
        for (int idx : cells[static_cast<size_t>(ny) * gx + nx]) {
          if (std::max(std::abs(out[idx].x_m - x), std::abs(out[idx].y_m - y)) <
              side_m) {
            ok = false;
            break;
          }
        }
      }
    }
    if (!ok) continue;
    cells[static_cast<size_t>(cy) * gx + cx].push_back(
        static_cast<int>(out.size()));
    out.push_back(GeoPoint{x, y, lat_deg, "local-metric"});
  }
  return out;
}

}  // namespace lur
