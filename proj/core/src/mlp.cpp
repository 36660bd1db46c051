#include "lurbench/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "lurbench/errors.hpp"
#include "lurbench/model.hpp"
#include "lurbench/nn/adam.hpp"
#include "lurbench/stats.hpp"

namespace lur {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

nn::Sequential<float> make_mlp(int in_features, const MlpSpec& spec) {
  nn::Sequential<float> net;
  int prev = in_features;
  for (size_t i = 0; i < spec.hidden.size(); ++i) {
    net.add("fc" + std::to_string(i + 1),
            std::make_unique<nn::Linear<float>>(prev, spec.hidden[i]));
    net.add("relu" + std::to_string(i + 1),
            std::make_unique<nn::ReLU<float>>());
    prev = spec.hidden[i];
  }
  net.add("out", std::make_unique<nn::Linear<float>>(prev, 1));
  return net;
}

nn::Tensor rows_to_tensor(const Matrix& x, const std::vector<int>& idx,
                          const std::vector<double>& mean,
                          const std::vector<double>& std_dev) {
  const int f = static_cast<int>(mean.size());
  nn::Tensor t({static_cast<int>(idx.size()), f});
  for (size_t i = 0; i < idx.size(); ++i) {
    const auto& row = x[static_cast<size_t>(idx[i])];
    for (int j = 0; j < f; ++j) {
      t.data[i * static_cast<size_t>(f) + static_cast<size_t>(j)] =
          static_cast<float>((row[static_cast<size_t>(j)] -
                              mean[static_cast<size_t>(j)]) /
                             std_dev[static_cast<size_t>(j)]);
    }
  }
  return t;
}

}  // namespace

void validate(const MlpSpec& spec) {
  if (spec.hidden.empty() || spec.hidden.size() > 3)
    throw ConfigError("mlp must have 1 to 3 hidden layers");
  for (int w : spec.hidden) {
    if (w < 1 || w > 30)
      throw ConfigError("mlp hidden width must lie in [1,30]");
  }
}

double MlpModel::predict(const std::vector<double>& full_x) {
  std::vector<int> one{0};
  Matrix row(1);
  row[0].reserve(selected.size());
  for (int c : selected) row[0].push_back(full_x[static_cast<size_t>(c)]);
  nn::Tensor t = rows_to_tensor(row, one, feat_mean, feat_std);
  nn::Tensor y = net.forward(t, /*train=*/false);
  return static_cast<double>(y.data[0]);
}

MlpModel train_mlp(const Matrix& x, const std::vector<double>& y,
                   const MlpSpec& spec, std::uint64_t seed,
                   const MlpTrainConfig& cfg) {
  validate(spec);
  if (x.empty() || x.size() != y.size())
    throw std::invalid_argument("train_mlp: bad training data");
  const int n = static_cast<int>(x.size());
  const int f = static_cast<int>(x[0].size());

  MlpModel model;
  model.spec = spec;
  model.selected.resize(static_cast<size_t>(f));
  std::iota(model.selected.begin(), model.selected.end(), 0);

  // Standardize with training statistics; constant columns pass through.
  model.feat_mean.assign(static_cast<size_t>(f), 0.0);
  model.feat_std.assign(static_cast<size_t>(f), 1.0);
  for (int j = 0; j < f; ++j) {
    double s = 0.0;
    for (const auto& row : x) s += row[static_cast<size_t>(j)];
    const double mean = s / n;
    double ss = 0.0;
    for (const auto& row : x) {
      const double d = row[static_cast<size_t>(j)] - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / n);
    model.feat_mean[static_cast<size_t>(j)] = mean;
    model.feat_std[static_cast<size_t>(j)] = sd > 0.0 ? sd : 1.0;
  }

  std::mt19937_64 rng(mix_seed(seed, 0));
  model.net = make_mlp(f, spec);
  model.net.init(rng());
  // Start the output at the target mean; the paper-scale targets would
  // otherwise dominate early epochs.
  {
    auto params = model.net.named_parameters();
    for (auto& [name, p] : params) {
      if (name == "out.bias") {
        p->data[0] = static_cast<float>(
            std::accumulate(y.begin(), y.end(), 0.0) / n);
      }
    }
  }

  // Validation split for early stopping.
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const int n_val =
      std::max(1, static_cast<int>(std::floor(cfg.validation_fraction * n)));
  std::vector<int> val_idx(order.begin(), order.begin() + n_val);
  std::vector<int> train_idx(order.begin() + n_val, order.end());
  if (train_idx.empty()) {
    train_idx = val_idx;
  }
  std::vector<double> val_y;
  for (int i : val_idx) val_y.push_back(y[static_cast<size_t>(i)]);
  const bool val_const = std::all_of(val_y.begin(), val_y.end(), [&](double v) {
    return v == val_y[0];
  });

  nn::AdamConfig<float> adam_cfg;
  adam_cfg.lr = static_cast<float>(cfg.lr);
  nn::Adam<float> opt(model.net.parameters(), adam_cfg);
  EarlyStopper stopper(cfg.patience);

  struct Snapshot {
    std::vector<std::vector<float>> params;
  } best;
  auto snapshot = [&]() {
    best.params.clear();
    for (auto& [name, p] : model.net.named_parameters())
      best.params.push_back(p->data);
  };

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    for (size_t start = 0; start < train_idx.size();
         start += static_cast<size_t>(cfg.batch)) {
      const size_t end = std::min(train_idx.size(),
                                  start + static_cast<size_t>(cfg.batch));
      std::vector<int> batch(train_idx.begin() + start,
                             train_idx.begin() + end);
      nn::Tensor xb =
          rows_to_tensor(x, batch, model.feat_mean, model.feat_std);
      nn::Tensor yb = model.net.forward(xb, /*train=*/true);
      std::vector<float> pred(yb.data.begin(),
                              yb.data.begin() + static_cast<long>(batch.size()));
      std::vector<float> truth(batch.size());
      for (size_t i = 0; i < batch.size(); ++i)
        truth[i] = static_cast<float>(y[static_cast<size_t>(batch[i])]);
      std::vector<float> grad;
      const float loss = nn::mse_loss(pred, truth, &grad);
      if (!std::isfinite(loss))
        throw DivergenceError("non-finite mlp loss", epoch);
      nn::Tensor gy({static_cast<int>(batch.size()), 1});
      std::copy(grad.begin(), grad.end(), gy.data.begin());
      model.net.zero_grad();
      model.net.backward(gy);
      opt.step();
    }

    nn::Tensor xv = rows_to_tensor(x, val_idx, model.feat_mean,
                                   model.feat_std);
    nn::Tensor yv = model.net.forward(xv, /*train=*/false);
    double score;
    if (val_const) {
      double mse = 0.0;
      for (size_t i = 0; i < val_idx.size(); ++i) {
        const double d = static_cast<double>(yv.data[i]) - val_y[i];
        mse += d * d;
      }
      score = -mse;
    } else {
      std::vector<double> pred(val_idx.size());
      for (size_t i = 0; i < val_idx.size(); ++i)
        pred[i] = static_cast<double>(yv.data[i]);
      score = r2(val_y, pred);
    }
    const double prev_best = stopper.best_score();
    const bool stop = stopper.report(epoch, score);
    if (score > prev_best) snapshot();
    if (stop) break;
  }

  if (!best.params.empty()) {
    size_t i = 0;
    for (auto& [name, p] : model.net.named_parameters())
      p->data = best.params[i++];
  }
  return model;
}

MlpBuildResult mlp_build(const Matrix& x, const std::vector<double>& y,
                         const std::vector<int>& category_of,
                         std::uint64_t seed, int budget,
                         const MlpTrainConfig& cfg) {
  if (budget < 1) throw std::invalid_argument("mlp_build budget must be >= 1");
  std::vector<int> vars = best_per_category(x, y, category_of);
  if (vars.empty()) throw DataError("mlp_build: no usable variables");
  std::sort(vars.begin(), vars.end());
  const Matrix sub = select_columns(x, vars);
  const int n = static_cast<int>(sub.size());
  const int k = std::min(10, n);
  const std::vector<int> fold = kfold_assignment(n, k, mix_seed(seed, 11));

  std::mt19937_64 sampler(mix_seed(seed, 12));
  auto sample_spec = [&]() {
    MlpSpec s;
    const int layers = 1 + static_cast<int>(sampler() % 3);
    s.hidden.clear();
    for (int i = 0; i < layers; ++i)
      s.hidden.push_back(1 + static_cast<int>(sampler() % 30));
    return s;
  };

  MlpSpec best_spec;
  double best_cv = -std::numeric_limits<double>::infinity();
  for (int e = 0; e < budget; ++e) {
    const MlpSpec cand = sample_spec();
    double acc = 0.0;
    int folds_used = 0;
    for (int fo = 0; fo < k; ++fo) {
      Matrix xtr, xte;
      std::vector<double> ytr, yte;
      for (int i = 0; i < n; ++i) {
        if (fold[static_cast<size_t>(i)] == fo) {
          xte.push_back(sub[static_cast<size_t>(i)]);
          yte.push_back(y[static_cast<size_t>(i)]);
        } else {
          xtr.push_back(sub[static_cast<size_t>(i)]);
          ytr.push_back(y[static_cast<size_t>(i)]);
        }
      }
      if (static_cast<int>(xtr.size()) < 4 || yte.size() < 2) continue;
      MlpModel m = train_mlp(xtr, ytr, cand, mix_seed(seed, 100 + e), cfg);
      std::vector<double> pred;
      pred.reserve(xte.size());
      for (const auto& row : xte) pred.push_back(m.predict(row));
      try {
        acc += r2(yte, pred);
        ++folds_used;
      } catch (const DataError&) {
      }
    }
    if (folds_used == 0) continue;
    const double score = acc / folds_used;
    if (score > best_cv) {
      best_cv = score;
      best_spec = cand;
    }
  }

  MlpBuildResult result;
  result.cv_r2 = best_cv;
  result.specs_evaluated = budget;
  result.model = train_mlp(sub, y, best_spec, mix_seed(seed, 13), cfg);
  result.model.selected = vars;
  return result;
}

}  // namespace lur
