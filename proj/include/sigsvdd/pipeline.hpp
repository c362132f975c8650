#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "sigsvdd/csv.hpp"
#include "sigsvdd/eval.hpp"
#include "sigsvdd/model.hpp"

namespace sigsvdd {

enum class WidthScope { Points, Windows };

struct InjectionSettings {
  std::vector<AnomalyKind> kinds = kAllAnomalyKinds;
  double magnitude = 1.0;
  std::uint64_t seed = 0;  // 0: derived from the run seed
  int count = 0;           // 0: one pseudo-anomaly per 4 normal windows
};

struct SolverSettings {
  int max_iters = 2000;
  double tol = 1e-8;
  double initial_step = 1.0;
};

struct RunConfig {
  std::string train_csv;
  std::string train_labels;  // optional
  std::string test_csv;
  std::string test_labels;
  std::string model_path = "model.json";
  std::string out = "report.json";

  int window_length = 100;
  int stride = 1;
  int test_stride = 0;  // 0: same as stride

  std::vector<double> nu_grid = {1.1, 2.0, 4.0, 10.0};
  std::vector<double> q_grid = {16.0 / 15.0, 8.0 / 7.0, 4.0 / 3.0, 2.0, 4.0, 8.0, 16.0};
  std::vector<double> c3_grid = {0.25, 2.5, 25.0};
  double c1 = 1.0;
  double c2 = 1.0;

  int k_neighbours = 5;
  double jitter = 1e-8;
  int refinement = 2;
  bool normalise_kernel = true;
  WidthScope width_scope = WidthScope::Points;
  double fallback_width = 1.0;
  double val_fraction = 0.8;

  InjectionSettings injection;
  SolverSettings solver;
  std::uint64_t seed = 42;
  int threads = 0;
};

nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

struct GridPointResult {
  double c3 = 0.0;
  double nu = 0.0;
  double q = 0.0;
  double val_au_pr = 0.0;
  bool converged = true;
  bool radius_fallback = false;
};

struct TrainResult {
  Model model;
  std::vector<GridPointResult> grid;
  GridPointResult selected;
  nlohmann::json report;
};

/// Split, inject pseudo-negatives, grid-search on validation AU-PR, retrain
/// on the full training data and persist the model JSON.
TrainResult run_train(const RunConfig& cfg);

/// Score the test series with the training normalisation scale and emit the
/// metrics report.
nlohmann::json run_score(const RunConfig& cfg, const Model& model);

/// Effective-kernel and Rademacher-bound diagnostics across the c3 grid.
nlohmann::json run_diagnostics(const RunConfig& cfg);

struct SynthConfig {
  int T = 5000;
  int d = 3;
  std::uint64_t seed = 7;
  std::vector<AnomalySegment> anomalies;
  int split_at = 0;  // > 0: also emit train/test CSVs split at this index
};

SynthConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json synth_config_to_json(const SynthConfig& cfg);

/// Writes series.csv and labels.csv (plus train.csv/test.csv/test_labels.csv
/// when split_at > 0) into out_dir.
void run_synth(const SynthConfig& cfg, const std::string& out_dir);

}  // namespace sigsvdd
