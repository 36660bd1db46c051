#pragma once

#include <cstdint>
#include <string>

#include "lurbench/citygen.hpp"
#include "lurbench/model.hpp"
#include "lurbench/scene.hpp"

namespace lur {

// Single configuration document for all commands. Every field has a
// default, so an empty JSON object is a valid config; CLI flags override
// keys one-to-one.
struct ExperimentConfig {
  // scene + ground truth
  CityConfig city;
  OracleParams oracle;
  std::uint64_t scene_seed = 1;

  // image window geometry
  double side_m = 80.0;
  int zoom = 17;
  double lat_deg = 51.5;
  int out_px = 224;
  std::string semantics = "map";  // map | satellite-like | map+satellite
  double satellite_noise_sigma = 0.1;
  std::uint64_t satellite_noise_seed = 7;

  // dataset
  int n_train = 3000;
  int n_test = 1500;
  std::uint64_t sample_seed = 2;

  // training
  TrainConfig train;

  // baseline budgets
  int rf_budget = 1000;
  int mlp_budget = 500;
  std::uint64_t baseline_seed = 3;

  // evaluation protocol
  int runs = 40;
  int cnn_runs = 5;
  std::uint64_t run_seed = 4;

  // pollution map rendering
  double map_scale_min_ugm3 = 30.0;
  double map_scale_max_ugm3 = 110.0;
  int map_grid = 32;
  double map_cell_m = 80.0;
  int map_cell_px = 8;

  // execution
  std::string out_dir = "out";
  int jobs = 0;  // 0 keeps the runtime default

  int cnn_channels() const;  // 3 or 6 from semantics
};

// Shrinks images to 64 px and batch to 64 (topology unchanged) and scales
// the remaining knobs to commodity-CPU budgets.
void apply_desk_profile(ExperimentConfig* cfg);

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json_text(const ExperimentConfig& cfg);

}  // namespace lur
