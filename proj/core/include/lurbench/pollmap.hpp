#pragma once

#include <string>
#include <vector>

#include "lurbench/config.hpp"
#include "lurbench/model.hpp"
#include "lurbench/scene.hpp"

namespace lur {

struct PollutionMapResult {
  int grid = 0;
  std::vector<double> estimates;  // row-major, north row first
  std::vector<Vec2> centers;
};

// Predicts every cell of a square window lattice centered on the scene and
// writes a colorized PNG plus a raw-value CSV.
PollutionMapResult render_pollution_map(TrainedModel& model,
                                        const Scene& scene,
                                        const ExperimentConfig& cfg,
                                        const std::string& png_path,
                                        const std::string& csv_path);

// Fixed five-stop gradient (deep blue through green and yellow to red)
// over [min,max] ug/m3.
Rgb pollution_color(double value, double min_v, double max_v);

}  // namespace lur
