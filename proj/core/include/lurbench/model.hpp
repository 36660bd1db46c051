#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lurbench/nn/adam.hpp"
#include "lurbench/nn/network.hpp"
#include "lurbench/scene.hpp"

namespace lur {

inline constexpr int kNumConvBlocks = 15;
inline constexpr int kConvFilters = 16;
inline constexpr int kHiddenUnits = 128;
// 1-indexed conv blocks followed by a 2x2/2 max pool.
inline constexpr std::array<int, 6> kPoolAfterBlock = {1, 3, 5, 7, 10, 13};

// Topology descriptor for the convolutional regressor: 15 blocks of
// (conv 16 filters, k=3, s=1, p=1, d=1 -> batchnorm -> relu), pooling after
// blocks 1/3/5/7/10/13, then flatten -> linear(128) -> relu -> linear(1).
struct ConvRegressorSpec {
  int in_channels = 3;
  int input_px = 224;

  std::vector<int> spatial_trace() const;  // px after each pool, incl. input
  int final_spatial() const;
  int flatten_size() const;
  std::size_t parameter_count() const;  // trainable parameters
};

// Validates and returns the topology for a channel count. input_px must
// survive six floor-halvings (>= 64).
ConvRegressorSpec build_conv_regressor(int in_channels, int input_px = 224);

template <typename T>
nn::Sequential<T> make_network(const ConvRegressorSpec& spec) {
  nn::Sequential<T> net;
  int ch = spec.in_channels;
  for (int b = 1; b <= kNumConvBlocks; ++b) {
    const std::string i = std::to_string(b);
    net.add("conv" + i,
            std::make_unique<nn::Conv2d<T>>(ch, kConvFilters, 3, 1, 1, 1));
    net.add("bn" + i, std::make_unique<nn::BatchNorm2d<T>>(kConvFilters));
    net.add("relu" + i, std::make_unique<nn::ReLU<T>>());
    for (int p : kPoolAfterBlock) {
      if (p == b) net.add("pool" + i, std::make_unique<nn::MaxPool2d<T>>());
    }
    ch = kConvFilters;
  }
  net.add("flatten", std::make_unique<nn::Flatten<T>>());
  net.add("fc1", std::make_unique<nn::Linear<T>>(spec.flatten_size(),
                                                 kHiddenUnits));
  net.add("relu_fc", std::make_unique<nn::ReLU<T>>());
  net.add("out", std::make_unique<nn::Linear<T>>(kHiddenUnits, 1));
  return net;
}

struct TrainConfig {
  double lr = 1e-4;
  int batch = 400;
  int max_epochs = 2000;
  int patience = 20;
  double validation_fraction = 0.1;
  bool augment = true;
  std::uint64_t seed = 0;
};

void validate(const TrainConfig& cfg);

struct TrainingSet {
  std::vector<TileImage> images;
  std::vector<double> targets_ugm3;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_r2 = 0.0;
};

struct TrainedModel {
  ConvRegressorSpec spec;
  nn::Sequential<float> net;  // holds the best-epoch parameters
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_val_r2 = 0.0;
  int stopped_epoch = 0;
};

// Tracks the best validation score; asks to stop after `patience`
// consecutive non-improving epochs (strict improvement counts).
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience);
  // Returns true when training should halt after this epoch.
  bool report(int epoch, double score);
  int best_epoch() const { return best_epoch_; }
  double best_score() const { return best_score_; }

 private:
  int patience_;
  int bad_streak_ = 0;
  int best_epoch_ = 0;
  double best_score_;
};

// One uniformly chosen element of the dihedral group (flips and
// transposition) applied to a square image.
TileImage augment(const TileImage& image, std::uint64_t seed);
TileImage apply_dihedral(const TileImage& image, int element);  // 0..7

TrainedModel train(const ConvRegressorSpec& spec, const TrainingSet& data,
                   const TrainConfig& cfg);

double predict(TrainedModel& model, const TileImage& image);
std::vector<double> predict_batch(TrainedModel& model,
                                  const std::vector<TileImage>& images,
                                  int batch = 256);

void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

void write_history_csv(const TrainedModel& model, const std::string& path);

}  // namespace lur
