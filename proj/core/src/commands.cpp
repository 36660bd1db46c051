#include "lurbench/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "lurbench/citygen.hpp"
#include "lurbench/dataset.hpp"
#include "lurbench/errors.hpp"
#include "lurbench/features.hpp"
#include "lurbench/geo.hpp"
#include "lurbench/interpret.hpp"
#include "lurbench/oracle.hpp"
#include "lurbench/pngio.hpp"
#include "lurbench/pollmap.hpp"
#include "lurbench/raster.hpp"
#include "lurbench/scene_json.hpp"
#include "lurbench/tileprovider.hpp"

namespace lur {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void write_text(const std::string& path, const std::string& text) {
  fs::create_directories(fs::path(path).parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + tmp);
    out << text;
    if (!out) throw DataError("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

SynthSummary summarize(const std::vector<double>& v) {
  SynthSummary s;
  s.n_total = static_cast<int>(v.size());
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.sd = std::sqrt(ss / v.size());
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  return s;
}

void print_stats_row(const char* name, const SynthSummary& s) {
  std::printf("%-14s %7d %8.2f %7.2f %8.2f %8.2f\n", name, s.n_total, s.mean,
              s.sd, s.min, s.max);
}

std::vector<Vec2> centers_of(const DatasetManifest& m) {
  std::vector<Vec2> out;
  out.reserve(m.samples.size());
  for (const auto& s : m.samples) out.push_back({s.x_m, s.y_m});
  return out;
}

void save_split(const ExperimentConfig& cfg, const std::string& split,
                const std::vector<long>& ids, const std::vector<Vec2>& centers,
                const std::vector<double>& targets, const Scene& scene) {
  DatasetManifest manifest;
  manifest.root = dataset_dir(cfg, split);
  manifest.side_m = cfg.side_m;
  manifest.zoom = cfg.zoom;
  manifest.lat_deg = cfg.lat_deg;
  manifest.out_px = cfg.out_px;
  manifest.semantics = image_semantics_from_string(cfg.semantics);
  manifest.palette_hash = Palette::map_default().hash();
  manifest.absent_distance_cap_m = kAbsentEntityDistanceM;
  for (size_t i = 0; i < ids.size(); ++i) {
    manifest.samples.push_back(
        {ids[i], centers[i].x, centers[i].y, targets[i]});
  }
  save_manifest(manifest);

  // Tiles; six-channel datasets store the map and satellite halves as two
  // PNG files per id.
  ExperimentConfig map_cfg = cfg;
  map_cfg.semantics = "map";
  const bool six = manifest.semantics == ImageSemantics::map_satellite;
  const bool sat_only = manifest.semantics == ImageSemantics::satellite_like;

  std::vector<TileImage> primary =
      sat_only ? render_tiles(scene, centers, cfg)
               : render_tiles(scene, centers, map_cfg);
  for (size_t i = 0; i < ids.size(); ++i) {
    write_png(primary[i], image_path(manifest, ids[i]));
  }
  if (six) {
    ExperimentConfig sat_cfg = cfg;
    sat_cfg.semantics = "satellite-like";
    std::vector<TileImage> sat = render_tiles(scene, centers, sat_cfg);
    for (size_t i = 0; i < ids.size(); ++i) {
      write_png(sat[i], satellite_image_path(manifest, ids[i]));
    }
  }
}

}  // namespace

std::string scene_path(const ExperimentConfig& cfg) {
  return cfg.out_dir + "/scene.json";
}

std::string dataset_dir(const ExperimentConfig& cfg,
                        const std::string& split) {
  return cfg.out_dir + "/dataset/" + split;
}

std::string model_path(const ExperimentConfig& cfg) {
  return cfg.out_dir + "/models/cnn.ckpt";
}

std::string runsample_path(const ExperimentConfig& cfg,
                           const std::string& model_id,
                           const std::string& split) {
  return cfg.out_dir + "/runs/" + model_id + "_" + split + ".json";
}

void write_run_record(const ExperimentConfig& cfg,
                      const std::string& command) {
  json record{
      {"command", command},
      {"version", "0.1.0"},
      {"config", json::parse(config_to_json_text(cfg))},
  };
  write_text(cfg.out_dir + "/run-records/" + command + ".json",
             record.dump(2) + "\n");
}

SynthSummary cmd_synth(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  const Scene scene = generate_city(cfg.city, cfg.scene_seed);
  save_scene(scene, scene_path(cfg));

  const int n_total = cfg.n_train + cfg.n_test;
  const Rect b = scene.bounds();
  const BoundingBox bbox{b.min_x, b.min_y, b.max_x, b.max_y};
  std::vector<GeoPoint> points;
  try {
    points =
        sample_nonoverlapping(bbox, n_total, cfg.side_m, cfg.sample_seed,
                              cfg.lat_deg);
  } catch (const CapacityError& e) {
    throw CapacityError(
        std::string(e.what()) +
            " (reduce n_train/n_test or side_m, or enlarge the city)",
        e.achieved());
  }
  std::vector<Vec2> centers;
  centers.reserve(points.size());
  for (const auto& p : points) centers.push_back({p.x_m, p.y_m});

  const std::vector<double> targets =
      oracle_targets(scene, centers, cfg.oracle);

  // Seeded shuffle splits the pool into train/test.
  std::vector<int> order(static_cast<size_t>(n_total));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(mix_seed(cfg.sample_seed, 0x51117));
  std::shuffle(order.begin(), order.end(), rng);

  auto slice = [&](int from, int to, const std::string& split) {
    std::vector<long> ids;
    std::vector<Vec2> c;
    std::vector<double> t;
    std::vector<int> sel(order.begin() + from, order.begin() + to);
    std::sort(sel.begin(), sel.end());
    for (int i : sel) {
      ids.push_back(i);
      c.push_back(centers[static_cast<size_t>(i)]);
      t.push_back(targets[static_cast<size_t>(i)]);
    }
    save_split(cfg, split, ids, c, t, scene);
    return summarize(t);
  };
  const SynthSummary train_stats = slice(0, cfg.n_train, "train");
  const SynthSummary test_stats =
      slice(cfg.n_train, n_total, "test");
  const SynthSummary pool = summarize(targets);

  std::printf("%-14s %7s %8s %7s %8s %8s\n", "dataset", "count", "mean", "sd",
              "min", "max");
  print_stats_row("sampled pool", pool);
  print_stats_row("train", train_stats);
  print_stats_row("test", test_stats);

  write_run_record(cfg, "synth");
  return pool;
}

ExperimentData load_experiment_data(const ExperimentConfig& cfg,
                                    bool with_features) {
  ExperimentData data;
  const DatasetManifest train_m = load_manifest(dataset_dir(cfg, "train"));
  const DatasetManifest test_m = load_manifest(dataset_dir(cfg, "test"));
  data.train_images.images = load_images(train_m);
  data.train_images.targets_ugm3 = targets_of(train_m);
  data.test_images.images = load_images(test_m);
  data.test_images.targets_ugm3 = targets_of(test_m);
  if (with_features) {
    const Scene scene = load_scene(scene_path(cfg));
    data.train_features = feature_matrix(scene, centers_of(train_m));
    data.test_features = feature_matrix(scene, centers_of(test_m));
  }
  return data;
}

void cmd_features(const ExperimentConfig& cfg) {
  const Scene scene = load_scene(scene_path(cfg));
  fs::create_directories(cfg.out_dir + "/features");
  for (const std::string split : {"train", "test"}) {
    const DatasetManifest m = load_manifest(dataset_dir(cfg, split));
    const Matrix features = feature_matrix(scene, centers_of(m));
    std::vector<std::string> header{"id"};
    for (const auto& n : feature_names()) header.push_back(n);
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < m.samples.size(); ++i) {
      std::vector<std::string> row{std::to_string(m.samples[i].id)};
      for (double v : features[i]) row.push_back(format_double(v));
      rows.push_back(std::move(row));
    }
    write_csv(cfg.out_dir + "/features/" + split + ".csv", header, rows);
  }
  write_run_record(cfg, "features");
}

void cmd_train(const ExperimentConfig& cfg) {
  ExperimentData data = load_experiment_data(cfg, /*with_features=*/false);
  const ConvRegressorSpec spec =
      build_conv_regressor(cfg.cnn_channels(), cfg.out_px);
  TrainedModel model = train(spec, data.train_images, cfg.train);
  fs::create_directories(cfg.out_dir + "/models");
  save_model(model, model_path(cfg));
  write_history_csv(model, cfg.out_dir + "/models/cnn_history.csv");
  std::printf("trained %d epochs (best %d, val r2 %.4f)\n",
              model.stopped_epoch, model.best_epoch, model.best_val_r2);
  write_run_record(cfg, "train");
}

void write_runsample_json(const RunSample& sample, const std::string& path) {
  json runs = json::array();
  for (const auto& r : sample.runs) {
    runs.push_back({{"r2", r.r2}, {"rmse", r.rmse}, {"n_test", r.n_test}});
  }
  json doc{{"model_id", sample.model_id},
           {"seeds", sample.seeds},
           {"complete", sample.complete},
           {"runs", runs}};
  write_text(path, doc.dump(2) + "\n");
}

RunSample read_runsample_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open runsample: " + path);
  json doc = json::parse(in);
  RunSample sample;
  sample.model_id = doc.at("model_id").get<std::string>();
  sample.complete = doc.value("complete", true);
  for (const auto& s : doc.value("seeds", json::array()))
    sample.seeds.push_back(s.get<std::uint64_t>());
  for (const auto& r : doc.at("runs")) {
    sample.runs.push_back({r.at("r2").get<double>(),
                           r.at("rmse").get<double>(),
                           r.at("n_test").get<int>()});
  }
  return sample;
}

EvalReport cmd_eval(const ExperimentConfig& cfg, ModelKind kind,
                    const std::string& split, int runs) {
  if (split != "train" && split != "test")
    throw ConfigError("eval split must be train or test");
  ExperimentData data =
      load_experiment_data(cfg, /*with_features=*/kind != ModelKind::cnn);
  // Evaluation targets the requested split; training always uses train.
  if (split == "train") {
    data.test_images = data.train_images;
    data.test_features = data.train_features;
  }

  EvalReport report;
  report.model_id = to_string(kind);
  report.split = split;

  if (kind == ModelKind::cnn && runs == 1 && fs::exists(model_path(cfg))) {
    TrainedModel model = load_model(model_path(cfg));
    const std::vector<double> pred =
        predict_batch(model, data.test_images.images, cfg.train.batch);
    EvalResult res;
    res.r2 = r2(data.test_images.targets_ugm3, pred);
    res.rmse = rmse(data.test_images.targets_ugm3, pred);
    res.n_test = static_cast<int>(pred.size());
    report.sample.model_id = report.model_id;
    report.sample.runs.push_back(res);
    report.sample.seeds.push_back(cfg.train.seed);
  } else {
    report.sample =
        multirun(report.model_id, make_run_fn(kind, data, cfg), runs,
                 mix_seed(cfg.run_seed, static_cast<std::uint64_t>(kind)));
  }

  write_runsample_json(report.sample,
                       runsample_path(cfg, report.model_id, split));
  std::printf("%s on %s: mean r2 %.4f, mean rmse %.3f over %zu run(s)\n",
              report.model_id.c_str(), split.c_str(),
              report.sample.mean_r2(), report.sample.mean_rmse(),
              report.sample.runs.size());
  write_run_record(cfg, "eval");
  return report;
}

namespace {

void write_compare_outputs(const ExperimentConfig& cfg,
                           const SignificanceReport& report) {
  json pairs = json::array();
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : report.pairs) {
    pairs.push_back({{"model_a", p.model_a},
                     {"model_b", p.model_b},
                     {"test", to_string(p.test)},
                     {"p", p.p},
                     {"threshold", p.threshold},
                     {"significant", p.significant}});
    rows.push_back({p.model_a, p.model_b, to_string(p.test),
                    format_double(p.p), format_double(p.threshold),
                    p.significant ? "1" : "0"});
  }
  json doc{{"n_hyp", report.n_hyp},
           {"alpha", report.alpha},
           {"metric", to_string(report.metric)},
           {"model_ids", report.model_ids},
           {"pairs", pairs}};
  json norm = json::array();
  for (double p : report.normality_p) {
    if (std::isnan(p)) {
      norm.push_back(nullptr);
    } else {
      norm.push_back(p);
    }
  }
  doc["normality_p"] = norm;
  write_text(cfg.out_dir + "/reports/compare.json", doc.dump(2) + "\n");
  write_csv(cfg.out_dir + "/reports/compare.csv",
            {"model_a", "model_b", "test", "p", "threshold", "significant"},
            rows);
}

}  // namespace

SignificanceReport cmd_compare(const ExperimentConfig& cfg,
                               const std::vector<ModelKind>& models,
                               int reference) {
  ExperimentData data = load_experiment_data(cfg, /*with_features=*/true);
  std::vector<RunSample> samples;
  for (ModelKind kind : models) {
    samples.push_back(multirun(
        to_string(kind), make_run_fn(kind, data, cfg), cfg.runs,
        mix_seed(cfg.run_seed, static_cast<std::uint64_t>(kind))));
    write_runsample_json(samples.back(),
                         runsample_path(cfg, to_string(kind), "test"));
  }
  const int n_hyp = static_cast<int>(models.size()) - 1;
  SignificanceReport report =
      compare_models(samples, n_hyp, MetricSelector::r2, reference);
  write_compare_outputs(cfg, report);
  write_run_record(cfg, "compare");
  return report;
}

SignificanceReport cmd_compare_from_files(
    const ExperimentConfig& cfg, const std::vector<std::string>& run_files,
    int reference) {
  std::vector<RunSample> samples;
  for (const auto& f : run_files) samples.push_back(read_runsample_json(f));
  const int n_hyp = static_cast<int>(samples.size()) - 1;
  SignificanceReport report =
      compare_models(samples, n_hyp, MetricSelector::r2, reference);
  write_compare_outputs(cfg, report);
  write_run_record(cfg, "compare");
  return report;
}

SweepTable cmd_sweep_data(const ExperimentConfig& cfg,
                          const std::vector<double>& fractions,
                          const std::vector<ModelKind>& models) {
  ExperimentData data = load_experiment_data(cfg, /*with_features=*/true);
  SweepTable table = data_sweep(data, cfg, fractions, models);
  fs::create_directories(cfg.out_dir + "/reports");
  write_sweep_csv(table, cfg.out_dir + "/reports/sweep_data.csv");
  write_run_record(cfg, "sweep-data");
  return table;
}

SweepTable cmd_sweep_area(const ExperimentConfig& cfg,
                          const std::vector<double>& side_lengths_m,
                          const std::vector<ModelKind>& models) {
  const Scene scene = load_scene(scene_path(cfg));
  const DatasetManifest train_m = load_manifest(dataset_dir(cfg, "train"));
  const DatasetManifest test_m = load_manifest(dataset_dir(cfg, "test"));
  SweepTable table = area_sweep(scene, centers_of(train_m),
                                centers_of(test_m), cfg, side_lengths_m,
                                models);
  // Flag the best-scoring setting per model.
  for (auto& row : table.rows) {
    bool best = !row.skipped;
    for (const auto& other : table.rows) {
      if (other.model_id == row.model_id && !other.skipped &&
          other.mean_r2 > row.mean_r2) {
        best = false;
        break;
      }
    }
    if (best) row.note = row.note.empty() ? "argmax_r2" : row.note;
  }
  fs::create_directories(cfg.out_dir + "/reports");
  write_sweep_csv(table, cfg.out_dir + "/reports/sweep_area.csv");
  write_run_record(cfg, "sweep-area");
  return table;
}

void cmd_probe(const ExperimentConfig& cfg, const std::string& kind) {
  if (!fs::exists(model_path(cfg)))
    throw DataError("probe needs a trained model at " + model_path(cfg));
  TrainedModel model = load_model(model_path(cfg));
  const Palette palette = Palette::map_default();
  const std::string dir = cfg.out_dir + "/probes";
  fs::create_directories(dir);
  const int out_px = model.spec.input_px;
  auto scaled = [&](int v224) { return std::max(1, (out_px * v224 + 112) / 224); };

  if (kind == "saliency") {
    const DatasetManifest test_m = load_manifest(dataset_dir(cfg, "test"));
    const int count =
        std::min<int>(4, static_cast<int>(test_m.samples.size()));
    std::vector<TileImage> tiles = load_images(test_m);
    for (int i = 0; i < count; ++i) {
      const long id = test_m.samples[static_cast<size_t>(i)].id;
      const SaliencyMap map = guided_saliency(model, tiles[static_cast<size_t>(i)]);
      write_png_gray(map.values, map.height, map.width,
                     dir + "/saliency_" + std::to_string(id) + ".png");
      if (tiles[static_cast<size_t>(i)].channels == 3) {
        write_png(tiles[static_cast<size_t>(i)],
                  dir + "/saliency_" + std::to_string(id) + "_input.png");
      }
    }
  } else if (kind == "entity") {
    const EntityProbeTable table = entity_probe(model, palette);
    std::vector<std::vector<std::string>> rows;
    for (const auto& cell : table.cells) {
      const std::string entity =
          std::holds_alternative<LandUseClass>(cell.entity)
              ? to_string(std::get<LandUseClass>(cell.entity))
              : to_string(std::get<RoadClass>(cell.entity));
      rows.push_back({cell.overlay ? to_string(*cell.overlay) : "none",
                      entity, format_double(cell.estimate_ugm3)});
    }
    write_csv(dir + "/entity.csv", {"overlay", "entity", "estimate_ugm3"},
              rows);
  } else if (kind == "area") {
    std::vector<int> widths{0};
    for (int w : {5, 10, 15, 20, 30, 40, 60, 80, 100}) {
      const int s = scaled(w);
      if (s > widths.back() && s < out_px) widths.push_back(s);
    }
    const AreaProbeResult res = area_probe(model, palette, widths);
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < res.horizontal.abscissa_px.size(); ++i) {
      rows.push_back({format_double(res.horizontal.abscissa_px[i]),
                      format_double(res.horizontal.estimate_ugm3[i]),
                      format_double(res.vertical.estimate_ugm3[i])});
    }
    write_csv(dir + "/area.csv",
              {"width_px", "estimate_horizontal", "estimate_vertical"}, rows);
  } else if (kind == "distance") {
    std::vector<int> offsets{0};
    for (int o : {5, 10, 15, 20, 30, 40, 50, 60, 80, 100}) {
      const int s = scaled(o);
      if (s > offsets.back()) offsets.push_back(s);
    }
    const ProbeCurve curve = distance_probe(model, palette, offsets);
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < curve.abscissa_px.size(); ++i) {
      rows.push_back({format_double(curve.abscissa_px[i]),
                      format_double(curve.estimate_ugm3[i])});
    }
    write_csv(dir + "/distance.csv", {"offset_px", "estimate_ugm3"}, rows);
    std::printf("distance probe pearson r = %.4f\n", curve.pearson_r);
  } else {
    throw ConfigError("unknown probe kind: " + kind);
  }
  write_run_record(cfg, "probe-" + kind);
}

void cmd_map(const ExperimentConfig& cfg) {
  if (!fs::exists(model_path(cfg)))
    throw DataError("map rendering needs a trained model at " +
                    model_path(cfg));
  TrainedModel model = load_model(model_path(cfg));
  const Scene scene = load_scene(scene_path(cfg));
  fs::create_directories(cfg.out_dir + "/map");
  render_pollution_map(model, scene, cfg, cfg.out_dir + "/map/pollution.png",
                       cfg.out_dir + "/map/pollution.csv");
  write_run_record(cfg, "map");
}

void cmd_fetch_tiles(const ExperimentConfig& cfg,
                     const std::string& provider_url_or_dir, int z, int x0,
                     int x1, int y0, int y1) {
  std::unique_ptr<TileProvider> provider;
  const bool is_http = provider_url_or_dir.rfind("http", 0) == 0;
  if (is_http) {
    HttpProviderOptions opt;
    opt.url_template = provider_url_or_dir;
    opt.cache_dir = cfg.out_dir + "/tiles";
    opt.min_interval_ms = 250;
    provider = std::make_unique<HttpTileProvider>(opt);
  } else {
    provider = std::make_unique<LocalTileProvider>(provider_url_or_dir);
  }
  int fetched = 0;
  for (int x = x0; x <= x1; ++x) {
    for (int y = y0; y <= y1; ++y) {
      const TileImage img = provider->fetch(TileIndex{z, x, y});
      if (!is_http) {
        // Copy local tiles into the cache layout for later runs.
        const std::string dst = cfg.out_dir + "/tiles/" + std::to_string(z) +
                                "/" + std::to_string(x);
        fs::create_directories(dst);
        write_png(img, dst + "/" + std::to_string(y) + ".png");
      }
      ++fetched;
    }
  }
  std::printf("fetched %d tile(s) into %s/tiles\n", fetched,
              cfg.out_dir.c_str());
  write_run_record(cfg, "fetch-tiles");
}

}  // namespace lur
