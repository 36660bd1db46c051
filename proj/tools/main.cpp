// lurbench: synthetic land-use-regression experiment workbench.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 numeric divergence, 5 placement capacity error.

#include <cstdio>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <omp.h>

#include "lurbench/commands.hpp"
#include "lurbench/errors.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir;
  bool desk_profile = false;
  int jobs = 0;
  std::vector<std::string> overrides;  // key=value pairs
};

lur::ExperimentConfig resolve_config(const GlobalArgs& args) {
  lur::ExperimentConfig cfg;
  if (!args.config_path.empty()) {
    cfg = lur::load_config(args.config_path);
  }
  if (args.desk_profile) lur::apply_desk_profile(&cfg);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (args.jobs > 0) cfg.jobs = args.jobs;
  if (cfg.jobs > 0) omp_set_num_threads(cfg.jobs);

  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw lur::ConfigError("override must be key=value: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    // Flags override config keys one-to-one through the JSON path.
    std::string json = "{\"" + key + "\": " + value + "}";
    try {
      // Round-trip through the JSON loader for validation and typing.
      auto doc = nlohmann::json::parse(lur::config_to_json_text(cfg));
      auto over = nlohmann::json::parse(json);
      for (auto& [k, v] : over.items()) doc[k] = v;
      cfg = lur::config_from_json_text(doc.dump());
    } catch (const nlohmann::json::exception& e) {
      throw lur::ConfigError("bad override '" + kv + "': " + e.what());
    }
  }
  return cfg;
}

std::vector<lur::ModelKind> parse_models(const std::string& csv) {
  std::vector<lur::ModelKind> kinds;
  std::string token;
  std::stringstream ss(csv);
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) kinds.push_back(lur::model_kind_from_string(token));
  }
  if (kinds.empty()) throw lur::ConfigError("empty model list");
  return kinds;
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::string token;
  std::stringstream ss(csv);
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) out.push_back(std::stod(token));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic land-use-regression experiment workbench"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "JSON configuration file");
  app.add_option("--out", g.out_dir, "Output directory (overrides config)");
  app.add_flag("--desk", g.desk_profile,
               "Desk-scale profile: 64 px tiles, batch 64, small budgets");
  app.add_option("--jobs", g.jobs, "Bound for internal parallelism");
  app.add_option("--set", g.overrides,
                 "Override a top-level config key, e.g. --set runs=5");

  auto* synth = app.add_subcommand("synth", "Generate the synthetic dataset");
  auto* features =
      app.add_subcommand("features", "Export baseline feature matrices");
  auto* train = app.add_subcommand("train", "Train the CNN regressor");

  auto* eval = app.add_subcommand("eval", "Evaluate a model");
  std::string eval_model = "cnn";
  std::string eval_split = "test";
  int eval_runs = 1;
  eval->add_option("--model", eval_model, "mean|linear|rf|mlp|cnn");
  eval->add_option("--split", eval_split, "train|test");
  eval->add_option("--runs", eval_runs, "Repeated-run protocol count");

  auto* compare =
      app.add_subcommand("compare", "Multi-run significance comparison");
  std::string compare_models_csv = "mean,linear,rf,mlp";
  std::vector<std::string> compare_files;
  int compare_reference = 0;
  compare->add_option("--models", compare_models_csv,
                      "Comma-separated model list (reference first)");
  compare->add_option("--from-runs", compare_files,
                      "Runsample JSON files written by eval --runs");
  compare->add_option("--reference", compare_reference,
                      "Index of the reference model");

  auto* sweep = app.add_subcommand("sweep", "Dataset-size or area-size sweep");
  std::string sweep_kind = "data";
  std::string sweep_models_csv = "mean,linear";
  std::string sweep_fractions = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
  std::string sweep_sides = "60,80,100,200,500,1000";
  sweep->add_option("kind", sweep_kind, "data|area")->required();
  sweep->add_option("--models", sweep_models_csv, "Models to sweep");
  sweep->add_option("--fractions", sweep_fractions,
                    "Training-set fractions (data sweep)");
  sweep->add_option("--sides", sweep_sides,
                    "Window side lengths in meters (area sweep)");

  auto* probe = app.add_subcommand("probe", "Interpretability probes");
  std::string probe_kind;
  probe->add_option("kind", probe_kind, "saliency|entity|area|distance")
      ->required();

  auto* map = app.add_subcommand("map", "Render the pollution map grid");

  auto* fetch = app.add_subcommand("fetch-tiles", "Fetch real map tiles");
  std::string fetch_provider;
  int fetch_z = 17, fetch_x0 = 0, fetch_x1 = 0, fetch_y0 = 0, fetch_y1 = 0;
  fetch->add_option("--provider", fetch_provider,
                    "URL template with {z}/{x}/{y} or a local directory")
      ->required();
  fetch->add_option("--z", fetch_z, "Zoom level");
  fetch->add_option("--x0", fetch_x0)->required();
  fetch->add_option("--x1", fetch_x1)->required();
  fetch->add_option("--y0", fetch_y0)->required();
  fetch->add_option("--y1", fetch_y1)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const lur::ExperimentConfig cfg = resolve_config(g);
    if (synth->parsed()) {
      lur::cmd_synth(cfg);
    } else if (features->parsed()) {
      lur::cmd_features(cfg);
    } else if (train->parsed()) {
      lur::cmd_train(cfg);
    } else if (eval->parsed()) {
      lur::cmd_eval(cfg, lur::model_kind_from_string(eval_model), eval_split,
                    eval_runs);
    } else if (compare->parsed()) {
      if (!compare_files.empty()) {
        lur::cmd_compare_from_files(cfg, compare_files, compare_reference);
      } else {
        lur::cmd_compare(cfg, parse_models(compare_models_csv),
                         compare_reference);
      }
    } else if (sweep->parsed()) {
      if (sweep_kind == "data") {
        lur::cmd_sweep_data(cfg, parse_doubles(sweep_fractions),
                            parse_models(sweep_models_csv));
      } else if (sweep_kind == "area") {
        lur::cmd_sweep_area(cfg, parse_doubles(sweep_sides),
                            parse_models(sweep_models_csv));
      } else {
        throw lur::ConfigError("sweep kind must be data or area");
      }
    } else if (probe->parsed()) {
      lur::cmd_probe(cfg, probe_kind);
    } else if (map->parsed()) {
      lur::cmd_map(cfg);
    } else if (fetch->parsed()) {
      lur::cmd_fetch_tiles(cfg, fetch_provider, fetch_z, fetch_x0, fetch_x1,
                           fetch_y0, fetch_y1);
    }
  } catch (const lur::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const lur::CapacityError& e) {
    std::fprintf(stderr, "capacity error: %s\n", e.what());
    return 5;
  } catch (const lur::DivergenceError& e) {
    std::fprintf(stderr, "divergence at epoch %d: %s\n", e.epoch(), e.what());
    return 4;
  } catch (const lur::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const lur::ShapeError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
