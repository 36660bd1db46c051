#include "lurbench/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "lurbench/errors.hpp"

namespace lur {

using nlohmann::json;

namespace {

template <typename T>
void get_if(const json& j, const char* key, T* out) {
  if (!j.contains(key)) return;
  try {
    *out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

int ExperimentConfig::cnn_channels() const {
  return image_semantics_from_string(semantics) ==
                 ImageSemantics::map_satellite
             ? 6
             : 3;
}

void apply_desk_profile(ExperimentConfig* cfg) {
  cfg->out_px = 64;
  cfg->train.batch = 64;
  cfg->train.max_epochs = 150;
  cfg->rf_budget = 30;
  cfg->mlp_budget = 20;
  cfg->map_grid = 16;
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  static const char* known[] = {
      "desk_profile", "city",          "oracle",       "scene_seed",
      "side_m",       "zoom",          "lat_deg",      "out_px",
      "semantics",    "satellite_noise_sigma", "satellite_noise_seed",
      "n_train",      "n_test",        "sample_seed",  "train",
      "rf_budget",    "mlp_budget",    "baseline_seed", "runs",
      "cnn_runs",     "run_seed",      "map_scale_min_ugm3",
      "map_scale_max_ugm3", "map_grid", "map_cell_m",  "map_cell_px",
      "out_dir",      "jobs"};
  for (const auto& [key, value] : doc.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("unknown config key: " + key);
  }

  if (doc.contains("city")) {
    const json& c = doc.at("city");
    get_if(c, "width_m", &cfg.city.width_m);
    get_if(c, "height_m", &cfg.city.height_m);
    get_if(c, "block_m", &cfg.city.block_m);
    get_if(c, "signal_fraction", &cfg.city.signal_fraction);
    get_if(c, "local_keep_prob", &cfg.city.local_keep_prob);
    get_if(c, "zone_fill_prob", &cfg.city.zone_fill_prob);
  }
  if (doc.contains("oracle")) {
    const json& o = doc.at("oracle");
    get_if(o, "background_ugm3", &cfg.oracle.background_ugm3);
    get_if(o, "industrial_weight_ugm3", &cfg.oracle.industrial_weight_ugm3);
    get_if(o, "decay_m", &cfg.oracle.decay_m);
    if (o.contains("road_weight_ugm3")) {
      const json& w = o.at("road_weight_ugm3");
      for (int i = 0; i < kNumRoadClasses; ++i) {
        const char* name = to_string(static_cast<RoadClass>(i));
        if (w.contains(name)) {
          cfg.oracle.road_weight_ugm3[static_cast<size_t>(i)] =
              w.at(name).get<double>();
        }
      }
    }
  }
  get_if(doc, "scene_seed", &cfg.scene_seed);
  get_if(doc, "side_m", &cfg.side_m);
  get_if(doc, "zoom", &cfg.zoom);
  get_if(doc, "lat_deg", &cfg.lat_deg);
  get_if(doc, "out_px", &cfg.out_px);
  get_if(doc, "semantics", &cfg.semantics);
  get_if(doc, "satellite_noise_sigma", &cfg.satellite_noise_sigma);
  get_if(doc, "satellite_noise_seed", &cfg.satellite_noise_seed);
  get_if(doc, "n_train", &cfg.n_train);
  get_if(doc, "n_test", &cfg.n_test);
  get_if(doc, "sample_seed", &cfg.sample_seed);
  if (doc.contains("train")) {
    const json& t = doc.at("train");
    get_if(t, "lr", &cfg.train.lr);
    get_if(t, "batch", &cfg.train.batch);
    get_if(t, "max_epochs", &cfg.train.max_epochs);
    get_if(t, "patience", &cfg.train.patience);
    get_if(t, "validation_fraction", &cfg.train.validation_fraction);
    get_if(t, "augment", &cfg.train.augment);
    get_if(t, "seed", &cfg.train.seed);
  }
  get_if(doc, "rf_budget", &cfg.rf_budget);
  get_if(doc, "mlp_budget", &cfg.mlp_budget);
  get_if(doc, "baseline_seed", &cfg.baseline_seed);
  get_if(doc, "runs", &cfg.runs);
  get_if(doc, "cnn_runs", &cfg.cnn_runs);
  get_if(doc, "run_seed", &cfg.run_seed);
  get_if(doc, "map_scale_min_ugm3", &cfg.map_scale_min_ugm3);
  get_if(doc, "map_scale_max_ugm3", &cfg.map_scale_max_ugm3);
  get_if(doc, "map_grid", &cfg.map_grid);
  get_if(doc, "map_cell_m", &cfg.map_cell_m);
  get_if(doc, "map_cell_px", &cfg.map_cell_px);
  get_if(doc, "out_dir", &cfg.out_dir);
  get_if(doc, "jobs", &cfg.jobs);

  bool desk = false;
  get_if(doc, "desk_profile", &desk);
  if (desk) apply_desk_profile(&cfg);

  // Re-apply explicit overrides that the profile would otherwise clobber.
  if (desk) {
    get_if(doc, "out_px", &cfg.out_px);
    if (doc.contains("train")) {
      const json& t = doc.at("train");
      get_if(t, "batch", &cfg.train.batch);
      get_if(t, "max_epochs", &cfg.train.max_epochs);
    }
    get_if(doc, "rf_budget", &cfg.rf_budget);
    get_if(doc, "mlp_budget", &cfg.mlp_budget);
    get_if(doc, "map_grid", &cfg.map_grid);
  }

  image_semantics_from_string(cfg.semantics);  // validates
  validate(cfg.train);
  if (cfg.n_train < 1 || cfg.n_test < 1)
    throw ConfigError("dataset sizes must be positive");
  if (cfg.out_px < 8) throw ConfigError("out_px must be >= 8");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return config_from_json_text(text);
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  json road_weights;
  for (int i = 0; i < kNumRoadClasses; ++i) {
    road_weights[to_string(static_cast<RoadClass>(i))] =
        cfg.oracle.road_weight_ugm3[static_cast<size_t>(i)];
  }
  json doc{
      {"city",
       {{"width_m", cfg.city.width_m},
        {"height_m", cfg.city.height_m},
        {"block_m", cfg.city.block_m},
        {"signal_fraction", cfg.city.signal_fraction},
        {"local_keep_prob", cfg.city.local_keep_prob},
        {"zone_fill_prob", cfg.city.zone_fill_prob}}},
      {"oracle",
       {{"background_ugm3", cfg.oracle.background_ugm3},
        {"industrial_weight_ugm3", cfg.oracle.industrial_weight_ugm3},
        {"decay_m", cfg.oracle.decay_m},
        {"road_weight_ugm3", road_weights}}},
      {"scene_seed", cfg.scene_seed},
      {"side_m", cfg.side_m},
      {"zoom", cfg.zoom},
      {"lat_deg", cfg.lat_deg},
      {"out_px", cfg.out_px},
      {"semantics", cfg.semantics},
      {"satellite_noise_sigma", cfg.satellite_noise_sigma},
      {"satellite_noise_seed", cfg.satellite_noise_seed},
      {"n_train", cfg.n_train},
      {"n_test", cfg.n_test},
      {"sample_seed", cfg.sample_seed},
      {"train",
       {{"lr", cfg.train.lr},
        {"batch", cfg.train.batch},
        {"max_epochs", cfg.train.max_epochs},
        {"patience", cfg.train.patience},
        {"validation_fraction", cfg.train.validation_fraction},
        {"augment", cfg.train.augment},
        {"seed", cfg.train.seed}}},
      {"rf_budget", cfg.rf_budget},
      {"mlp_budget", cfg.mlp_budget},
      {"baseline_seed", cfg.baseline_seed},
      {"runs", cfg.runs},
      {"cnn_runs", cfg.cnn_runs},
      {"run_seed", cfg.run_seed},
      {"map_scale_min_ugm3", cfg.map_scale_min_ugm3},
      {"map_scale_max_ugm3", cfg.map_scale_max_ugm3},
      {"map_grid", cfg.map_grid},
      {"map_cell_m", cfg.map_cell_m},
      {"map_cell_px", cfg.map_cell_px},
      {"out_dir", cfg.out_dir},
      {"jobs", cfg.jobs},
  };
  return doc.dump(2) + "\n";
}

}  // namespace lur
