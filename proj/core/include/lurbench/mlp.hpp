#pragma once

#include <cstdint>
#include <vector>

#include "lurbench/baselines.hpp"
#include "lurbench/nn/network.hpp"

namespace lur {

// Hidden layout of the perceptron baseline: 1-3 layers of 1-30 neurons,
// relu activations, scalar linear output.
struct MlpSpec {
  std::vector<int> hidden{16};
};

void validate(const MlpSpec& spec);

struct MlpTrainConfig {
  double lr = 1e-4;
  int batch = 32;
  int max_epochs = 2000;
  int patience = 20;
  double validation_fraction = 0.1;
};

struct MlpModel {
  MlpSpec spec;
  std::vector<int> selected;  // feature columns fed to the network
  std::vector<double> feat_mean, feat_std;
  nn::Sequential<float> net;

  double predict(const std::vector<double>& full_x);
};

struct MlpBuildResult {
  MlpModel model;
  double cv_r2 = 0.0;
  int specs_evaluated = 0;
};

// Architecture search within the bounds above: best buffer per category,
// uniform random sampling of layer count and widths, 10-fold CV scoring
// under an evaluation budget, winner retrained on the full set.
MlpBuildResult mlp_build(const Matrix& x, const std::vector<double>& y,
                         const std::vector<int>& category_of,
                         std::uint64_t seed, int budget,
                         const MlpTrainConfig& cfg = {});

// Trains one MLP on standardized inputs; exposed for unit tests.
MlpModel train_mlp(const Matrix& x, const std::vector<double>& y,
                   const MlpSpec& spec, std::uint64_t seed,
                   const MlpTrainConfig& cfg);

}  // namespace lur
