#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lurbench/baselines.hpp"
#include "lurbench/config.hpp"
#include "lurbench/model.hpp"
#include "lurbench/scene.hpp"
#include "lurbench/stats.hpp"

namespace lur {

enum class ModelKind : int { mean = 0, linear, rf, mlp, cnn };
const char* to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

// Everything the evaluation protocol consumes: tiles for the CNN, the 14
// hand-crafted features for the baselines, and the shared targets.
struct ExperimentData {
  TrainingSet train_images;
  TrainingSet test_images;
  Matrix train_features;
  Matrix test_features;
};

// Computes feature matrices for sample locations against the scene.
Matrix feature_matrix(const Scene& scene, const std::vector<Vec2>& centers);

// Trains one instance with `seed` and returns its test metrics.
using RunFn = std::function<EvalResult(std::uint64_t seed)>;

// Repeats `runs` independently seeded instances on the fixed train/test
// split. Diverged runs are dropped and flagged.
RunSample multirun(const std::string& model_id, const RunFn& run_fn, int runs,
                   std::uint64_t base_seed);

// Builds the run function for a model kind over prepared data.
RunFn make_run_fn(ModelKind kind, const ExperimentData& data,
                  const ExperimentConfig& cfg);

struct SweepRow {
  std::string setting;  // fraction or side length
  std::string model_id;
  double mean_r2 = 0.0;
  double mean_rmse = 0.0;
  int runs = 0;
  std::uint64_t base_seed = 0;
  bool skipped = false;
  std::string note;
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

// Nested-subset training-size sweep: smaller fractions are strict prefixes
// of larger ones under one seeded shuffle. The CNN runs fewer repeats per
// point than the baselines.
SweepTable data_sweep(const ExperimentData& data, const ExperimentConfig& cfg,
                      const std::vector<double>& fractions,
                      const std::vector<ModelKind>& models);

// The nested subset (training indices) used by data_sweep for a fraction;
// exposed for the subset audit.
std::vector<int> sweep_subset(int n_train, double fraction,
                              std::uint64_t seed);

// Re-rasterizes the dataset at each window side length and repeats the
// evaluation protocol per setting.
SweepTable area_sweep(const Scene& scene,
                      const std::vector<Vec2>& train_centers,
                      const std::vector<Vec2>& test_centers,
                      const ExperimentConfig& cfg,
                      const std::vector<double>& side_lengths_m,
                      const std::vector<ModelKind>& models);

void write_sweep_csv(const SweepTable& table, const std::string& path);

// Rasterizes map (or satellite-like / six-channel) tiles for the centers.
std::vector<TileImage> render_tiles(const Scene& scene,
                                    const std::vector<Vec2>& centers,
                                    const ExperimentConfig& cfg,
                                    double side_m_override = 0.0);

std::vector<double> oracle_targets(const Scene& scene,
                                   const std::vector<Vec2>& centers,
                                   const OracleParams& params);

}  // namespace lur
