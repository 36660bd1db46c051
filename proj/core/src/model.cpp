#include "lurbench/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "lurbench/errors.hpp"
#include "lurbench/nn/checkpoint.hpp"
#include "lurbench/stats.hpp"

namespace lur {

std::vector<int> ConvRegressorSpec::spatial_trace() const {
  std::vector<int> trace{input_px};
  int px = input_px;
  for (size_t i = 0; i < kPoolAfterBlock.size(); ++i) {
    px /= 2;
    trace.push_back(px);
  }
  return trace;
}

int ConvRegressorSpec::final_spatial() const { return spatial_trace().back(); }

int ConvRegressorSpec::flatten_size() const {
  const int s = final_spatial();
  return kConvFilters * s * s;
}

std::size_t ConvRegressorSpec::parameter_count() const {
  std::size_t total = 0;
  int ch = in_channels;
  for (int b = 1; b <= kNumConvBlocks; ++b) {
    total += static_cast<std::size_t>(ch) * 9 * kConvFilters + kConvFilters;
    total += 2 * kConvFilters;  // batch-norm scale and shift
    ch = kConvFilters;
  }
  total += static_cast<std::size_t>(flatten_size()) * kHiddenUnits +
           kHiddenUnits;
  total += kHiddenUnits + 1;
  return total;
}

ConvRegressorSpec build_conv_regressor(int in_channels, int input_px) {
  if (in_channels != 3 && in_channels != 6) {
    throw std::invalid_argument("in_channels must be 3 or 6");
  }
  if (input_px < 64) {
    throw std::invalid_argument(
        "input_px must be >= 64 to survive six pooling halvings");
  }
  return ConvRegressorSpec{in_channels, input_px};
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 0.5)) {
    throw ConfigError("validation_fraction must lie in (0, 0.5)");
  }
  if (cfg.patience < 1) throw ConfigError("patience must be >= 1");
  if (cfg.batch < 1) throw ConfigError("batch must be >= 1");
  if (cfg.max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (!(cfg.lr > 0.0)) throw ConfigError("lr must be positive");
}

EarlyStopper::EarlyStopper(int patience)
    : patience_(patience),
      best_score_(-std::numeric_limits<double>::infinity()) {
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
}

bool EarlyStopper::report(int epoch, double score) {
  if (score > best_score_) {
    best_score_ = score;
    best_epoch_ = epoch;
    bad_streak_ = 0;
    return false;
  }
  ++bad_streak_;
  return bad_streak_ >= patience_;
}

namespace {

// Destination (y,x) reads source (sy,sx). Bit 0: transpose, bit 1: flip x,
// bit 2: flip y. This generates all 8 square symmetries.
inline void dihedral_source(int element, int n, int y, int x, int* sy,
                            int* sx) {
  int ty = y, tx = x;
  if (element & 4) ty = n - 1 - ty;
  if (element & 2) tx = n - 1 - tx;
  if (element & 1) std::swap(ty, tx);
  *sy = ty;
  *sx = tx;
}

void copy_dihedral(const TileImage& img, int element, float* dst) {
  const int n = img.height;
  const size_t plane = img.pixel_count();
  if (element == 0) {
    std::copy(img.data.begin(), img.data.end(), dst);
    return;
  }
  for (int c = 0; c < img.channels; ++c) {
    const float* src = img.data.data() + c * plane;
    float* out = dst + c * plane;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        int sy, sx;
        dihedral_source(element, n, y, x, &sy, &sx);
        out[y * n + x] = src[sy * n + sx];
      }
    }
  }
}

void check_dataset(const ConvRegressorSpec& spec, const TrainingSet& data) {
  if (data.images.empty()) throw DataError("training set is empty");
  if (data.images.size() != data.targets_ugm3.size())
    throw DataError("images/targets size mismatch");
  for (const auto& img : data.images) {
    if (img.channels != spec.in_channels)
      throw ShapeError("image channels do not match the model");
    if (img.height != spec.input_px || img.width != spec.input_px)
      throw ShapeError("image resolution does not match the model");
  }
}

// Validation split stratified by target decile.
void split_train_val(const std::vector<double>& targets, double fraction,
                     std::mt19937_64& rng, std::vector<int>* train_idx,
                     std::vector<int>* val_idx) {
  const int n = static_cast<int>(targets.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (targets[a] != targets[b]) return targets[a] < targets[b];
    return a < b;
  });
  const int buckets = 10;
  for (int b = 0; b < buckets; ++b) {
    const int lo = static_cast<int>(static_cast<long>(n) * b / buckets);
    const int hi = static_cast<int>(static_cast<long>(n) * (b + 1) / buckets);
    std::vector<int> bucket(order.begin() + lo, order.begin() + hi);
    std::shuffle(bucket.begin(), bucket.end(), rng);
    const int n_val = static_cast<int>(
        std::floor(fraction * static_cast<double>(bucket.size())));
    for (size_t i = 0; i < bucket.size(); ++i) {
      (static_cast<int>(i) < n_val ? val_idx : train_idx)
          ->push_back(bucket[i]);
    }
  }
  std::sort(train_idx->begin(), train_idx->end());
  std::sort(val_idx->begin(), val_idx->end());
  if (val_idx->empty() && n > 1) {
    val_idx->push_back(train_idx->back());
    train_idx->pop_back();
  }
}

struct Snapshot {
  std::vector<std::vector<float>> params;
  std::vector<std::vector<float>> buffers;
};

Snapshot take_snapshot(nn::Sequential<float>& net) {
  Snapshot s;
  for (auto& [name, p] : net.named_parameters()) s.params.push_back(p->data);
  for (auto& [name, b] : net.named_buffers()) s.buffers.push_back(b->data);
  return s;
}

void restore_snapshot(nn::Sequential<float>& net, const Snapshot& s) {
  size_t i = 0;
  for (auto& [name, p] : net.named_parameters()) p->data = s.params[i++];
  i = 0;
  for (auto& [name, b] : net.named_buffers()) b->data = s.buffers[i++];
}

std::vector<double> forward_eval(nn::Sequential<float>& net,
                                 const std::vector<TileImage>& images,
                                 const std::vector<int>& idx, int batch_size,
                                 int channels, int px) {
  std::vector<double> out;
  out.reserve(idx.size());
  const size_t sample = static_cast<size_t>(channels) * px * px;
  for (size_t start = 0; start < idx.size();
       start += static_cast<size_t>(batch_size)) {
    const size_t end =
        std::min(idx.size(), start + static_cast<size_t>(batch_size));
    const int nb = static_cast<int>(end - start);
    nn::Tensor x({nb, channels, px, px});
    for (int i = 0; i < nb; ++i) {
      const auto& img = images[idx[start + i]];
      std::copy(img.data.begin(), img.data.end(),
                x.data.begin() + static_cast<size_t>(i) * sample);
    }
    nn::Tensor y = net.forward(x, /*train=*/false);
    for (int i = 0; i < nb; ++i) out.push_back(y.data[i]);
  }
  return out;
}

}  // namespace

TileImage apply_dihedral(const TileImage& image, int element) {
  if (image.height != image.width)
    throw std::invalid_argument("dihedral augmentation needs a square image");
  if (element < 0 || element > 7)
    throw std::invalid_argument("dihedral element must be in [0,7]");
  TileImage out = image;
  copy_dihedral(image, element, out.data.data());
  return out;
}

TileImage augment(const TileImage& image, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int element = static_cast<int>(rng() % 8);
  return apply_dihedral(image, element);
}

TrainedModel train(const ConvRegressorSpec& spec, const TrainingSet& data,
                   const TrainConfig& cfg) {
  validate(cfg);
  check_dataset(spec, data);

  std::mt19937_64 rng(cfg.seed);
  std::vector<int> train_idx, val_idx;
  split_train_val(data.targets_ugm3, cfg.validation_fraction, rng, &train_idx,
                  &val_idx);

  TrainedModel model;
  model.spec = spec;
  model.net = make_network<float>(spec);
  model.net.init(rng());

  nn::AdamConfig<float> adam_cfg;
  adam_cfg.lr = static_cast<float>(cfg.lr);
  nn::Adam<float> opt(model.net.parameters(), adam_cfg);

  std::vector<double> val_targets;
  val_targets.reserve(val_idx.size());
  for (int i : val_idx) val_targets.push_back(data.targets_ugm3[i]);

  const int px = spec.input_px;
  const int ch = spec.in_channels;
  const size_t sample = static_cast<size_t>(ch) * px * px;

  EarlyStopper stopper(cfg.patience);
  Snapshot best;
  std::vector<int> order = train_idx;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    size_t loss_n = 0;

    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(cfg.batch)) {
      const size_t end =
          std::min(order.size(), start + static_cast<size_t>(cfg.batch));
      const int nb = static_cast<int>(end - start);
      nn::Tensor x({nb, ch, px, px});
      std::vector<float> y_true(nb);
      for (int i = 0; i < nb; ++i) {
        const int si = order[start + i];
        const int element = cfg.augment ? static_cast<int>(rng() % 8) : 0;
        copy_dihedral(data.images[si], element,
                      x.data.data() + static_cast<size_t>(i) * sample);
        y_true[i] = static_cast<float>(data.targets_ugm3[si]);
      }
      nn::Tensor y = model.net.forward(x, /*train=*/true);
      std::vector<float> pred(y.data.begin(), y.data.begin() + nb);
      std::vector<float> grad;
      const float loss = nn::mse_loss(pred, y_true, &grad);
      if (!std::isfinite(loss)) {
        throw DivergenceError("non-finite training loss", epoch);
      }
      loss_sum += static_cast<double>(loss) * nb;
      loss_n += static_cast<size_t>(nb);

      nn::Tensor gy({nb, 1});
      std::copy(grad.begin(), grad.end(), gy.data.begin());
      model.net.zero_grad();
      model.net.backward(gy);
      opt.step();
    }

    const std::vector<double> val_pred = forward_eval(
        model.net, data.images, val_idx, cfg.batch, ch, px);
    const double val_r2 = r2(val_targets, val_pred);
    model.history.push_back(
        {epoch, loss_sum / static_cast<double>(loss_n), val_r2});

    const double prev_best = stopper.best_score();
    const bool stop = stopper.report(epoch, val_r2);
    if (val_r2 > prev_best) best = take_snapshot(model.net);
    model.stopped_epoch = epoch;
    if (stop) break;
  }

  model.best_epoch = stopper.best_epoch();
  model.best_val_r2 = stopper.best_score();
  if (!best.params.empty()) restore_snapshot(model.net, best);
  return model;
}

double predict(TrainedModel& model, const TileImage& image) {
  if (image.channels != model.spec.in_channels)
    throw ShapeError("predict: channel mismatch");
  if (image.height != model.spec.input_px ||
      image.width != model.spec.input_px)
    throw ShapeError("predict: resolution mismatch");
  nn::Tensor x({1, image.channels, image.height, image.width});
  std::copy(image.data.begin(), image.data.end(), x.data.begin());
  nn::Tensor y = model.net.forward(x, /*train=*/false);
  return static_cast<double>(y.data[0]);
}

std::vector<double> predict_batch(TrainedModel& model,
                                  const std::vector<TileImage>& images,
                                  int batch) {
  std::vector<int> idx(images.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (const auto& img : images) {
    if (img.channels != model.spec.in_channels ||
        img.height != model.spec.input_px ||
        img.width != model.spec.input_px)
      throw ShapeError("predict_batch: image shape mismatch");
  }
  return forward_eval(model.net, images, idx, batch, model.spec.in_channels,
                      model.spec.input_px);
}

void save_model(const TrainedModel& model, const std::string& path) {
  nn::Checkpoint ckpt;
  ckpt.meta["in_channels"] = model.spec.in_channels;
  ckpt.meta["input_px"] = model.spec.input_px;
  ckpt.meta["best_epoch"] = model.best_epoch;
  auto& net = const_cast<TrainedModel&>(model).net;
  for (auto& [name, p] : net.named_parameters()) {
    ckpt.entries.push_back({name, p->shape, p->data});
  }
  for (auto& [name, b] : net.named_buffers()) {
    ckpt.entries.push_back({name, b->shape, b->data});
  }
  save_checkpoint(ckpt, path);
}

TrainedModel load_model(const std::string& path) {
  nn::Checkpoint ckpt = load_checkpoint(path);
  TrainedModel model;
  model.spec = build_conv_regressor(
      static_cast<int>(ckpt.meta.at("in_channels")),
      static_cast<int>(ckpt.meta.at("input_px")));
  model.best_epoch = static_cast<int>(ckpt.meta.count("best_epoch")
                                          ? ckpt.meta.at("best_epoch")
                                          : 0);
  model.net = make_network<float>(model.spec);
  auto load_into = [&](const std::string& name, nn::TensorT<float>* t) {
    const nn::CheckpointEntry* e = ckpt.find(name);
    if (!e) throw DataError("checkpoint missing tensor: " + name);
    if (e->shape != t->shape)
      throw ShapeError("checkpoint shape mismatch for " + name);
    t->data = e->data;
  };
  for (auto& [name, p] : model.net.named_parameters()) load_into(name, p);
  for (auto& [name, b] : model.net.named_buffers()) load_into(name, b);
  return model;
}

void write_history_csv(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "epoch,train_loss,val_r2\n";
  char buf[96];
  for (const auto& rec : model.history) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g\n", rec.epoch,
                  rec.train_loss, rec.val_r2);
    out << buf;
  }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace lur
