#include "lurbench/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lurbench/errors.hpp"

namespace lur {

namespace {

int default_probe_road_width(int out_px) {
  // 10 px at the 224 px reference scale.
  return std::max(2, (out_px * 10 + 112) / 224);
}

int entity_overlay_width(int out_px) {
  // 30 px at the 224 px reference scale.
  return std::max(3, (out_px * 30 + 112) / 224);
}

double predict_tile(TrainedModel& model, const TileImage& tile) {
  return predict(model, tile);
}

}  // namespace

SaliencyMap guided_saliency(TrainedModel& model, const TileImage& image) {
  if (image.channels != model.spec.in_channels ||
      image.height != model.spec.input_px ||
      image.width != model.spec.input_px)
    throw ShapeError("guided_saliency: image shape mismatch");

  model.net.set_guided(true);
  nn::Tensor x({1, image.channels, image.height, image.width});
  std::copy(image.data.begin(), image.data.end(), x.data.begin());
  nn::Tensor y = model.net.forward(x, /*train=*/false);
  nn::Tensor gy({1, 1});
  gy.data[0] = 1.0f;
  model.net.zero_grad();
  nn::Tensor gx = model.net.backward(gy);
  model.net.zero_grad();
  model.net.set_guided(false);

  SaliencyMap map;
  map.height = image.height;
  map.width = image.width;
  map.values.assign(static_cast<size_t>(image.height) * image.width, 0.0f);
  const size_t plane = image.pixel_count();
  for (size_t p = 0; p < plane; ++p) {
    float best = 0.0f;
    for (int c = 0; c < image.channels; ++c) {
      best = std::max(best, std::abs(gx.data[c * plane + p]));
    }
    map.values[p] = best;
  }
  const auto [mn, mx] =
      std::minmax_element(map.values.begin(), map.values.end());
  if (*mx == *mn) {
    map.degenerate = true;
    std::fill(map.values.begin(), map.values.end(), 0.0f);
  } else {
    const float lo = *mn, span = *mx - *mn;
    for (auto& v : map.values) v = (v - lo) / span;
  }
  return map;
}

EntityProbeTable entity_probe(TrainedModel& model, const Palette& palette) {
  const int out_px = model.spec.input_px;
  EntityProbeTable table;
  table.overlay_width_px = entity_overlay_width(out_px);

  std::vector<ProbeEntity> entities;
  for (int c = 0; c < kNumLandUseClasses; ++c)
    entities.push_back(static_cast<LandUseClass>(c));
  entities.push_back(RoadClass::motorway);
  entities.push_back(RoadClass::trunk);

  const std::vector<std::optional<RoadClass>> overlays = {
      std::nullopt, RoadClass::trunk, RoadClass::motorway};

  for (const auto& overlay : overlays) {
    for (const auto& entity : entities) {
      // Overlaying a road on a road-covered tile is omitted.
      if (overlay && std::holds_alternative<RoadClass>(entity)) continue;
      ArtificialTileSpec spec;
      spec.entity = entity;
      spec.out_px = out_px;
      if (overlay) {
        spec.overlay = RoadOverlay{*overlay, table.overlay_width_px,
                                   RoadAxis::vertical, 0};
      }
      const TileImage tile = artificial_tile(spec, palette);
      table.cells.push_back(
          {entity, overlay, predict_tile(model, tile)});
    }
  }
  return table;
}

namespace {

ProbeCurve area_curve(TrainedModel& model, const Palette& palette,
                      const std::vector<int>& widths_px, RoadAxis axis) {
  ProbeCurve curve;
  const int out_px = model.spec.input_px;
  for (size_t i = 1; i < widths_px.size(); ++i) {
    if (widths_px[i] <= widths_px[i - 1])
      throw std::invalid_argument("widths must be strictly increasing");
  }
  for (int w : widths_px) {
    ArtificialTileSpec spec;
    spec.entity = LandUseClass::neutral;
    spec.out_px = out_px;
    if (w > 0) spec.overlay = RoadOverlay{RoadClass::trunk, w, axis, 0};
    const TileImage tile = artificial_tile(spec, palette);
    curve.abscissa_px.push_back(w);
    curve.estimate_ugm3.push_back(predict_tile(model, tile));
  }
  curve.pearson_r =
      pearson_correlation(curve.abscissa_px, curve.estimate_ugm3);
  return curve;
}

}  // namespace

AreaProbeResult area_probe(TrainedModel& model, const Palette& palette,
                           const std::vector<int>& widths_px) {
  AreaProbeResult res;
  res.horizontal = area_curve(model, palette, widths_px, RoadAxis::horizontal);
  res.vertical = area_curve(model, palette, widths_px, RoadAxis::vertical);
  return res;
}

ProbeCurve distance_probe(TrainedModel& model, const Palette& palette,
                          const std::vector<int>& offsets_px, int width_px) {
  const int out_px = model.spec.input_px;
  if (width_px <= 0) width_px = default_probe_road_width(out_px);
  for (size_t i = 1; i < offsets_px.size(); ++i) {
    if (offsets_px[i] <= offsets_px[i - 1])
      throw std::invalid_argument("offsets must be strictly increasing");
  }
  ProbeCurve curve;
  for (int off : offsets_px) {
    ArtificialTileSpec spec;
    spec.entity = LandUseClass::neutral;
    spec.out_px = out_px;
    // A road moved fully past the edge leaves the plain background tile.
    const int start = out_px / 2 + off - width_px / 2;
    const bool visible = start < out_px && start + width_px > 0;
    if (visible) {
      spec.overlay =
          RoadOverlay{RoadClass::trunk, width_px, RoadAxis::vertical, off};
    }
    const TileImage tile = artificial_tile(spec, palette);
    curve.abscissa_px.push_back(off);
    curve.estimate_ugm3.push_back(predict_tile(model, tile));
  }
  curve.pearson_r =
      pearson_correlation(curve.abscissa_px, curve.estimate_ugm3);
  return curve;
}

double pearson_correlation(const std::vector<double>& a,
                           const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("pearson needs two equal vectors, n >= 2");
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / b.size();
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

namespace {

std::vector<double> mean_ranks(const std::vector<double>& v) {
  std::vector<size_t> order(v.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t i, size_t j) { return v[i] < v[j]; });
  std::vector<double> rank(v.size(), 0.0);
  size_t i = 0;
  while (i < v.size()) {
    size_t j = i;
    while (j + 1 < v.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 +
                     1.0;
    for (size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman_correlation(const std::vector<double>& a,
                            const std::vector<double>& b) {
  return pearson_correlation(mean_ranks(a), mean_ranks(b));
}

}  // namespace lur
