#pragma once

#include <string>
#include <vector>

#include "lurbench/config.hpp"
#include "lurbench/runner.hpp"
#include "lurbench/stats.hpp"

namespace lur {

// Command implementations shared by the CLI and the integration tests.
// All artifacts land under cfg.out_dir; every command writes a run record
// (config snapshot + seeds) for reproducibility.

struct SynthSummary {
  int n_total = 0;
  double mean = 0.0, sd = 0.0, min = 0.0, max = 0.0;
};

// City generation, non-overlapping sampling, tile rendering, oracle
// targets, train/test manifests. Returns pool statistics.
SynthSummary cmd_synth(const ExperimentConfig& cfg);

// Feature matrices for both splits as CSV.
void cmd_features(const ExperimentConfig& cfg);

// Trains the convolutional regressor on the train split; writes the
// checkpoint and the per-epoch history CSV.
void cmd_train(const ExperimentConfig& cfg);

struct EvalReport {
  std::string model_id;
  std::string split;
  RunSample sample;  // one entry when runs == 1
};

// Evaluates a model on a split. runs > 1 retrains independently seeded
// instances (multirun protocol); the CNN with runs == 1 reuses the stored
// checkpoint.
EvalReport cmd_eval(const ExperimentConfig& cfg, ModelKind kind,
                    const std::string& split, int runs);

// Significance protocol across models: equal run counts, normality-gated
// paired tests, Bonferroni threshold alpha / n_hyp.
SignificanceReport cmd_compare(const ExperimentConfig& cfg,
                               const std::vector<ModelKind>& models,
                               int reference = 0);
// Same, over runsample JSON files written by cmd_eval.
SignificanceReport cmd_compare_from_files(
    const ExperimentConfig& cfg, const std::vector<std::string>& run_files,
    int reference = 0);

SweepTable cmd_sweep_data(const ExperimentConfig& cfg,
                          const std::vector<double>& fractions,
                          const std::vector<ModelKind>& models);
SweepTable cmd_sweep_area(const ExperimentConfig& cfg,
                          const std::vector<double>& side_lengths_m,
                          const std::vector<ModelKind>& models);

void cmd_probe(const ExperimentConfig& cfg, const std::string& kind);

void cmd_map(const ExperimentConfig& cfg);

void cmd_fetch_tiles(const ExperimentConfig& cfg,
                     const std::string& provider_url_or_dir, int z, int x0,
                     int x1, int y0, int y1);

// Paths under out_dir.
std::string scene_path(const ExperimentConfig& cfg);
std::string dataset_dir(const ExperimentConfig& cfg, const std::string& split);
std::string model_path(const ExperimentConfig& cfg);
std::string runsample_path(const ExperimentConfig& cfg,
                           const std::string& model_id,
                           const std::string& split);

void write_run_record(const ExperimentConfig& cfg, const std::string& command);

void write_runsample_json(const RunSample& sample, const std::string& path);
RunSample read_runsample_json(const std::string& path);

// Loads both splits plus features into memory for the runner.
ExperimentData load_experiment_data(const ExperimentConfig& cfg,
                                    bool with_features);

}  // namespace lur
