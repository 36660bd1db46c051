#include "lurbench/runner.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "lurbench/dataset.hpp"
#include "lurbench/errors.hpp"
#include "lurbench/features.hpp"
#include "lurbench/forest.hpp"
#include "lurbench/mlp.hpp"
#include "lurbench/oracle.hpp"
#include "lurbench/raster.hpp"

namespace lur {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::mean: return "mean";
    case ModelKind::linear: return "linear";
    case ModelKind::rf: return "rf";
    case ModelKind::mlp: return "mlp";
    case ModelKind::cnn: return "cnn";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(ModelKind::cnn); ++i) {
    if (s == to_string(static_cast<ModelKind>(i)))
      return static_cast<ModelKind>(i);
  }
  throw ConfigError("unknown model kind: " + s);
}

Matrix feature_matrix(const Scene& scene, const std::vector<Vec2>& centers) {
  Matrix out(centers.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(centers.size()); ++i) {
    const FeatureVector f = feature_vector(scene, centers[static_cast<size_t>(i)]);
    out[static_cast<size_t>(i)] =
        std::vector<double>(f.values.begin(), f.values.end());
  }
  return out;
}

RunSample multirun(const std::string& model_id, const RunFn& run_fn, int runs,
                   std::uint64_t base_seed) {
  if (runs < 1) throw std::invalid_argument("multirun needs runs >= 1");
  RunSample sample;
  sample.model_id = model_id;
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t seed = mix_seed(base_seed, static_cast<std::uint64_t>(r));
    try {
      sample.runs.push_back(run_fn(seed));
      sample.seeds.push_back(seed);
    } catch (const DivergenceError&) {
      sample.complete = false;
    }
  }
  return sample;
}

namespace {

EvalResult eval_predictions(const std::vector<double>& y,
                            const std::vector<double>& pred) {
  EvalResult res;
  res.r2 = r2(y, pred);
  res.rmse = rmse(y, pred);
  res.n_test = static_cast<int>(y.size());
  return res;
}

}  // namespace

RunFn make_run_fn(ModelKind kind, const ExperimentData& data,
                  const ExperimentConfig& cfg) {
  const std::vector<double>& train_y = data.train_images.targets_ugm3;
  const std::vector<double>& test_y = data.test_images.targets_ugm3;

  switch (kind) {
    case ModelKind::mean:
      return [&train_y, &test_y](std::uint64_t) {
        const MeanModel m = mean_model(train_y);
        std::vector<double> pred(test_y.size(), m.predict());
        return eval_predictions(test_y, pred);
      };
    case ModelKind::linear:
      return [&](std::uint64_t) {
        const StepwiseResult m = stepwise_linear(
            data.train_features, train_y, standard_feature_categories());
        std::vector<double> pred;
        pred.reserve(data.test_features.size());
        for (const auto& row : data.test_features) pred.push_back(m.predict(row));
        return eval_predictions(test_y, pred);
      };
    case ModelKind::rf:
      return [&, budget = cfg.rf_budget](std::uint64_t seed) {
        const RfBuildResult m = rf_build(data.train_features, train_y,
                                         standard_feature_categories(), seed,
                                         budget);
        std::vector<double> pred;
        pred.reserve(data.test_features.size());
        for (const auto& row : data.test_features) pred.push_back(m.predict(row));
        return eval_predictions(test_y, pred);
      };
    case ModelKind::mlp:
      return [&, budget = cfg.mlp_budget](std::uint64_t seed) {
        MlpBuildResult m = mlp_build(data.train_features, train_y,
                                     standard_feature_categories(), seed,
                                     budget);
        std::vector<double> pred;
        pred.reserve(data.test_features.size());
        for (const auto& row : data.test_features)
          pred.push_back(m.model.predict(row));
        return eval_predictions(test_y, pred);
      };
    case ModelKind::cnn:
      return [&](std::uint64_t seed) {
        const ConvRegressorSpec spec =
            build_conv_regressor(cfg.cnn_channels(), cfg.out_px);
        TrainConfig tc = cfg.train;
        tc.seed = seed;
        TrainedModel m = train(spec, data.train_images, tc);
        const std::vector<double> pred =
            predict_batch(m, data.test_images.images, tc.batch);
        return eval_predictions(test_y, pred);
      };
  }
  throw std::invalid_argument("unhandled model kind");
}

std::vector<int> sweep_subset(int n_train, double fraction,
                              std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw std::invalid_argument("fraction must lie in (0,1]");
  std::vector<int> order(static_cast<size_t>(n_train));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(mix_seed(seed, 0xDA7A));
  std::shuffle(order.begin(), order.end(), rng);
  const int k =
      std::max(1, static_cast<int>(std::lround(fraction * n_train)));
  order.resize(static_cast<size_t>(std::min(k, n_train)));
  return order;
}

SweepTable data_sweep(const ExperimentData& data, const ExperimentConfig& cfg,
                      const std::vector<double>& fractions,
                      const std::vector<ModelKind>& models) {
  SweepTable table;
  const int n_train = static_cast<int>(data.train_images.images.size());

  for (double fraction : fractions) {
    const std::vector<int> subset =
        sweep_subset(n_train, fraction, cfg.run_seed);

    ExperimentData sub;
    sub.test_images = data.test_images;
    sub.test_features = data.test_features;
    for (int i : subset) {
      sub.train_images.images.push_back(data.train_images.images[static_cast<size_t>(i)]);
      sub.train_images.targets_ugm3.push_back(
          data.train_images.targets_ugm3[static_cast<size_t>(i)]);
      if (!data.train_features.empty())
        sub.train_features.push_back(data.train_features[static_cast<size_t>(i)]);
    }

    for (ModelKind kind : models) {
      SweepRow row;
      row.setting = format_double(fraction);
      row.model_id = to_string(kind);
      row.base_seed = mix_seed(cfg.run_seed,
                               static_cast<std::uint64_t>(fraction * 1000) * 31 +
                                   static_cast<std::uint64_t>(kind));
      const int runs = kind == ModelKind::cnn ? cfg.cnn_runs : cfg.runs;
      if (kind == ModelKind::cnn &&
          static_cast<int>(subset.size()) < 2 * cfg.train.batch) {
        row.skipped = true;
        row.note = "fraction yields fewer than 2 batches";
        table.rows.push_back(row);
        continue;
      }
      const RunSample sample =
          multirun(row.model_id, make_run_fn(kind, sub, cfg), runs,
                   row.base_seed);
      row.mean_r2 = sample.mean_r2();
      row.mean_rmse = sample.mean_rmse();
      row.runs = static_cast<int>(sample.runs.size());
      table.rows.push_back(row);
    }
  }
  return table;
}

std::vector<TileImage> render_tiles(const Scene& scene,
                                    const std::vector<Vec2>& centers,
                                    const ExperimentConfig& cfg,
                                    double side_m_override) {
  const double side = side_m_override > 0.0 ? side_m_override : cfg.side_m;
  const Palette palette = Palette::map_default();
  const ImageSemantics semantics = image_semantics_from_string(cfg.semantics);
  std::vector<TileImage> tiles(centers.size());

#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(centers.size()); ++i) {
    const auto& c = centers[static_cast<size_t>(i)];
    GeoWindow window{GeoPoint{c.x, c.y, cfg.lat_deg, "local-metric"}, side,
                     cfg.zoom};
    switch (semantics) {
      case ImageSemantics::map:
        tiles[static_cast<size_t>(i)] =
            rasterize(scene, window, cfg.out_px, palette);
        break;
      case ImageSemantics::satellite_like:
        tiles[static_cast<size_t>(i)] = synth_satellite(
            scene, window, cfg.out_px,
            mix_seed(cfg.satellite_noise_seed, static_cast<std::uint64_t>(i)),
            cfg.satellite_noise_sigma);
        break;
      case ImageSemantics::map_satellite: {
        TileImage m = rasterize(scene, window, cfg.out_px, palette);
        TileImage s = synth_satellite(
            scene, window, cfg.out_px,
            mix_seed(cfg.satellite_noise_seed, static_cast<std::uint64_t>(i)),
            cfg.satellite_noise_sigma);
        tiles[static_cast<size_t>(i)] = concat_channels(m, s);
        break;
      }
    }
  }
  return tiles;
}

std::vector<double> oracle_targets(const Scene& scene,
                                   const std::vector<Vec2>& centers,
                                   const OracleParams& params) {
  std::vector<double> out(centers.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(centers.size()); ++i) {
    out[static_cast<size_t>(i)] =
        oracle_concentration(scene, centers[static_cast<size_t>(i)], params);
  }
  return out;
}

SweepTable area_sweep(const Scene& scene,
                      const std::vector<Vec2>& train_centers,
                      const std::vector<Vec2>& test_centers,
                      const ExperimentConfig& cfg,
                      const std::vector<double>& side_lengths_m,
                      const std::vector<ModelKind>& models) {
  SweepTable table;
  for (double side : side_lengths_m) {
    ExperimentData data;
    data.train_images.images = render_tiles(scene, train_centers, cfg, side);
    data.train_images.targets_ugm3 =
        oracle_targets(scene, train_centers, cfg.oracle);
    data.test_images.images = render_tiles(scene, test_centers, cfg, side);
    data.test_images.targets_ugm3 =
        oracle_targets(scene, test_centers, cfg.oracle);
    data.train_features = feature_matrix(scene, train_centers);
    data.test_features = feature_matrix(scene, test_centers);

    for (ModelKind kind : models) {
      SweepRow row;
      row.setting = format_double(side);
      row.model_id = to_string(kind);
      row.base_seed =
          mix_seed(cfg.run_seed, static_cast<std::uint64_t>(side) * 37 +
                                     static_cast<std::uint64_t>(kind));
      const int runs = kind == ModelKind::cnn ? cfg.cnn_runs : cfg.runs;
      const RunSample sample =
          multirun(row.model_id, make_run_fn(kind, data, cfg), runs,
                   row.base_seed);
      row.mean_r2 = sample.mean_r2();
      row.mean_rmse = sample.mean_rmse();
      row.runs = static_cast<int>(sample.runs.size());
      table.rows.push_back(row);
    }
  }
  return table;
}

void write_sweep_csv(const SweepTable& table, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : table.rows) {
    rows.push_back({r.setting, r.model_id, format_double(r.mean_r2),
                    format_double(r.mean_rmse), std::to_string(r.runs),
                    std::to_string(r.base_seed),
                    r.skipped ? "skipped:" + r.note : "ok"});
  }
  write_csv(path,
            {"setting", "model", "mean_r2", "mean_rmse", "runs", "base_seed",
             "status"},
            rows);
}

}  // namespace lur
