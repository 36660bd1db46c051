#include "lurbench/pollmap.hpp"

#include <algorithm>
#include <cmath>

#include "lurbench/dataset.hpp"
#include "lurbench/pngio.hpp"
#include "lurbench/raster.hpp"

namespace lur {

Rgb pollution_color(double value, double min_v, double max_v) {
  const double t =
      std::clamp((value - min_v) / std::max(1e-12, max_v - min_v), 0.0, 1.0);
  static const Rgb stops[5] = {{0.05f, 0.08f, 0.35f},
                               {0.10f, 0.55f, 0.85f},
                               {0.45f, 0.80f, 0.30f},
                               {0.97f, 0.88f, 0.20f},
                               {0.85f, 0.15f, 0.10f}};
  const double x = t * 4.0;
  const int i = std::min(3, static_cast<int>(x));
  const float f = static_cast<float>(x - i);
  return Rgb{stops[i].r + f * (stops[i + 1].r - stops[i].r),
             stops[i].g + f * (stops[i + 1].g - stops[i].g),
             stops[i].b + f * (stops[i + 1].b - stops[i].b)};
}

PollutionMapResult render_pollution_map(TrainedModel& model,
                                        const Scene& scene,
                                        const ExperimentConfig& cfg,
                                        const std::string& png_path,
                                        const std::string& csv_path) {
  const int grid = cfg.map_grid;
  const Rect bounds = scene.bounds();
  const double cx = 0.5 * (bounds.min_x + bounds.max_x);
  const double cy = 0.5 * (bounds.min_y + bounds.max_y);
  const double cell = cfg.map_cell_m;
  const double origin_x = cx - 0.5 * grid * cell;
  const double origin_y = cy + 0.5 * grid * cell;

  PollutionMapResult result;
  result.grid = grid;
  result.centers.reserve(static_cast<size_t>(grid) * grid);
  for (int row = 0; row < grid; ++row) {
    for (int col = 0; col < grid; ++col) {
      result.centers.push_back({origin_x + (col + 0.5) * cell,
                                origin_y - (row + 0.5) * cell});
    }
  }

  const Palette palette = Palette::map_default();
  std::vector<TileImage> tiles(result.centers.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(result.centers.size()); ++i) {
    const auto& c = result.centers[static_cast<size_t>(i)];
    GeoWindow window{GeoPoint{c.x, c.y, cfg.lat_deg, "local-metric"},
                     cfg.side_m, cfg.zoom};
    tiles[static_cast<size_t>(i)] =
        rasterize(scene, window, model.spec.input_px, palette);
  }
  if (model.spec.in_channels != 3) {
    throw ShapeError("pollution map rendering expects a 3-channel model");
  }
  result.estimates = predict_batch(model, tiles, 256);

  // Colorized PNG, map_cell_px pixels per cell.
  const int px = cfg.map_cell_px;
  TileImage img =
      make_image(grid * px, grid * px, 3, ImageSemantics::map);
  for (int row = 0; row < grid; ++row) {
    for (int col = 0; col < grid; ++col) {
      const Rgb c = pollution_color(
          result.estimates[static_cast<size_t>(row) * grid + col],
          cfg.map_scale_min_ugm3, cfg.map_scale_max_ugm3);
      for (int dy = 0; dy < px; ++dy) {
        for (int dx = 0; dx < px; ++dx) {
          img.at(0, row * px + dy, col * px + dx) = c.r;
          img.at(1, row * px + dy, col * px + dx) = c.g;
          img.at(2, row * px + dy, col * px + dx) = c.b;
        }
      }
    }
  }
  write_png(img, png_path);

  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < result.centers.size(); ++i) {
    rows.push_back({format_double(result.centers[i].x),
                    format_double(result.centers[i].y),
                    format_double(result.estimates[i])});
  }
  write_csv(csv_path, {"x_m", "y_m", "estimate_ugm3"}, rows);
  return result;
}

}  // namespace lur
