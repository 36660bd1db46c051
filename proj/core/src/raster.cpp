#include "lurbench/raster.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "lurbench/errors.hpp"

namespace lur {

namespace {

struct Candidates {
  std::vector<int> roads;  // indices into scene.roads, list order
  std::vector<int> zones;
};

Candidates collect_candidates(const Scene& scene, const Rect& view) {
  Candidates c;
  for (size_t i = 0; i < scene.roads.size(); ++i) {
    const auto& r = scene.roads[i];
    if (bounds_of(r.points).expanded(r.width_m * 0.5).intersects(view)) {
      c.roads.push_back(static_cast<int>(i));
    }
  }
  for (size_t i = 0; i < scene.zones.size(); ++i) {
    if (bounds_of(scene.zones[i].points).intersects(view)) {
      c.zones.push_back(static_cast<int>(i));
    }
  }
  return c;
}

Rgb resolve_color(const Scene& scene, const Candidates& cand, const Vec2& p,
                  const Palette& palette) {
  for (auto it = cand.roads.rbegin(); it != cand.roads.rend(); ++it) {
    const auto& r = scene.roads[*it];
    if (dist_point_polyline(p, r.points) <= r.width_m * 0.5) {
      return palette.of(r.cls);
    }
  }
  for (auto it = cand.zones.rbegin(); it != cand.zones.rend(); ++it) {
    const auto& z = scene.zones[*it];
    if (point_in_polygon(p, z.points)) return palette.of(z.cls);
  }
  return palette.of(scene.background);
}

}  // namespace

TileImage rasterize(const Scene& scene, const GeoWindow& window, int out_px,
                    const Palette& palette) {
  if (window.side_m <= 0.0)
    throw std::invalid_argument("degenerate window: side_m <= 0");
  if (out_px < 8) throw std::invalid_argument("out_px must be >= 8");

  const double half = window.side_m * 0.5;
  const double cx = window.center.x_m;
  const double cy = window.center.y_m;
  const Rect view{cx - half, cy - half, cx + half, cy + half};
  const Candidates cand = collect_candidates(scene, view);

  const int ss = out_px * 2;  // 2x supersampling
  const double step = window.side_m / ss;
  TileImage img = make_image(out_px, out_px, 3, ImageSemantics::map);

  // Row 0 is the north edge of the window.
#pragma omp parallel for schedule(static)
  for (int oy = 0; oy < out_px; ++oy) {
    for (int ox = 0; ox < out_px; ++ox) {
      float acc[3] = {0.0f, 0.0f, 0.0f};
      for (int sy = 0; sy < 2; ++sy) {
        for (int sx = 0; sx < 2; ++sx) {
          const double wx = view.min_x + (2 * ox + sx + 0.5) * step;
          const double wy = view.max_y - (2 * oy + sy + 0.5) * step;
          const Rgb c = resolve_color(scene, cand, {wx, wy}, palette);
          acc[0] += c.r;
          acc[1] += c.g;
          acc[2] += c.b;
        }
      }
      img.at(0, oy, ox) = acc[0] * 0.25f;
      img.at(1, oy, ox) = acc[1] * 0.25f;
      img.at(2, oy, ox) = acc[2] * 0.25f;
    }
  }
  return img;
}

TileImage synth_satellite(const Scene& scene, const GeoWindow& window,
                          int out_px, std::uint64_t noise_seed,
                          double noise_sigma) {
  TileImage img =
      rasterize(scene, window, out_px, Palette::satellite_default());
  img.semantics = ImageSemantics::satellite_like;
  if (noise_sigma > 0.0) {
    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<float> noise(0.0f,
                                          static_cast<float>(noise_sigma));
    for (auto& v : img.data) {
      v = std::clamp(v + noise(rng), 0.0f, 1.0f);
    }
  }
  return img;
}

TileImage artificial_tile(const ArtificialTileSpec& spec,
                          const Palette& palette) {
  if (spec.out_px < 8) throw std::invalid_argument("out_px must be >= 8");
  const Rgb base = std::holds_alternative<LandUseClass>(spec.entity)
                       ? palette.of(std::get<LandUseClass>(spec.entity))
                       : palette.of(std::get<RoadClass>(spec.entity));
  TileImage img = make_image(spec.out_px, spec.out_px, 3, ImageSemantics::map);
  for (int c = 0; c < 3; ++c) {
    const float v = c == 0 ? base.r : (c == 1 ? base.g : base.b);
    std::fill_n(img.data.begin() + static_cast<size_t>(c) * img.pixel_count(),
                img.pixel_count(), v);
  }
  if (spec.overlay) {
    const auto& ov = *spec.overlay;
    if (ov.width_px <= 0)
      throw std::invalid_argument("road width must be positive");
    const int n = spec.out_px;
    const int start = n / 2 + ov.offset_px - ov.width_px / 2;
    const int lo = std::max(0, start);
    const int hi = std::min(n, start + ov.width_px);
    if (lo >= hi)
      throw std::invalid_argument("road lies fully outside the image");
    const Rgb rc = palette.of(ov.cls);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const int along = ov.axis == RoadAxis::vertical ? x : y;
        if (along >= lo && along < hi) {
          img.at(0, y, x) = rc.r;
          img.at(1, y, x) = rc.g;
          img.at(2, y, x) = rc.b;
        }
      }
    }
  }
  return img;
}

}  // namespace lur
