#pragma once

#include <string>
#include <vector>

#include "sigsvdd/sigkernel.hpp"
#include "sigsvdd/svdd.hpp"

namespace sigsvdd {

struct ModelDiagnostics {
  double gram_asymmetry = 0.0;
  double gram_min_eigenvalue = 0.0;
  double q_min_eigenvalue = 0.0;
  double trace_gap = 0.0;
  double kkt_residual = 0.0;
  double identity_residual = 0.0;
  bool solver_converged = true;
  bool radius_fallback = false;
  // per c3-grid-point diagnostics recorded during training
  std::vector<double> grid_c3;
  std::vector<double> grid_trace_gap;
  std::vector<double> grid_min_eigenvalue_q;
};

/// The trained detector: everything needed to score new windows.
struct Model {
  std::vector<Path> train_windows;
  std::vector<int> labels;
  Vector beta;
  Vector train_self_raw;  // raw self-kernels of the training windows
  double r2 = 0.0;
  double tau2 = 0.0;
  double quad_term = 0.0;  // beta^T K beta / 4
  double scale = 1.0;      // training normalisation scale
  StaticKernelConfig static_cfg;
  SigKernelConfig sig_cfg;
  HyperParams hp;
  ModelDiagnostics diag;
};

/// Squared distance to the description centre:
/// kappa(x, x) - sum_j beta_j kappa(x, x_j) + beta^T K beta / 4.
double distance_squared(const Path& x, const Model& m);

/// distance_squared(x) - r^2; anomaly iff positive.
double score(const Path& x, const Model& m);

std::vector<double> score_all(const std::vector<Path>& xs, const Model& m, int threads = 0);

/// Train from a precomputed Gram over `windows` (entries must match the
/// configs stored alongside). Shared by the direct path and the pipeline.
Model train_model_from_gram(const GramMatrix& gram, const Matrix& raw_self,
                            const std::vector<Path>& windows, const std::vector<int>& labels,
                            const StaticKernelConfig& scfg, const SigKernelConfig& kcfg,
                            const HyperParams& hp, int knn_k, double graph_width,
                            const SolveOptions& opts);

/// Convenience end-to-end training on a window set.
Model train_model(const std::vector<Path>& windows, const std::vector<int>& labels,
                  const StaticKernelConfig& scfg, const SigKernelConfig& kcfg,
                  const HyperParams& hp, int knn_k, double jitter,
                  const SolveOptions& opts = {}, int threads = 0);

std::string model_to_json_string(const Model& m);
Model model_from_json_string(const std::string& text);
void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

}  // namespace sigsvdd
