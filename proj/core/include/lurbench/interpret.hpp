#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lurbench/model.hpp"
#include "lurbench/raster.hpp"

namespace lur {

// Channel-max of absolute guided gradients, min-max normalized to [0,1].
struct SaliencyMap {
  int height = 0;
  int width = 0;
  std::vector<float> values;
  bool degenerate = false;  // all gradients were zero before normalization
  std::string model_id;
  std::string input_id;
};

// Guided backpropagation from the scalar output to the input pixels. The
// model is evaluated in eval mode and left unmodified.
SaliencyMap guided_saliency(TrainedModel& model, const TileImage& image);

struct EntityProbeCell {
  ProbeEntity entity;
  std::optional<RoadClass> overlay;  // nullopt = no road row
  double estimate_ugm3 = 0.0;
};

struct EntityProbeTable {
  std::vector<EntityProbeCell> cells;  // road-on-road cells omitted
  int overlay_width_px = 0;
};

// 9 full-cover entities (7 land uses + motorway + trunk) crossed with
// {none, trunk, motorway} overlays.
EntityProbeTable entity_probe(TrainedModel& model, const Palette& palette);

struct ProbeCurve {
  std::vector<double> abscissa_px;      // strictly increasing
  std::vector<double> estimate_ugm3;    // per abscissa point
  double pearson_r = 0.0;
};

// Centered trunk road of growing width; both axes evaluated.
struct AreaProbeResult {
  ProbeCurve horizontal;
  ProbeCurve vertical;
};
AreaProbeResult area_probe(TrainedModel& model, const Palette& palette,
                           const std::vector<int>& widths_px);

// Fixed-width trunk road moved away from the center. Offsets that push
// the road fully outside fall back to the uniform background tile.
ProbeCurve distance_probe(TrainedModel& model, const Palette& palette,
                          const std::vector<int>& offsets_px,
                          int width_px = 0 /* 0: scaled default */);

double pearson_correlation(const std::vector<double>& a,
                           const std::vector<double>& b);
double spearman_correlation(const std::vector<double>& a,
                            const std::vector<double>& b);

}  // namespace lur
