#include "sigsvdd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace sigsvdd {

using nlohmann::json;

namespace {

const char* anomaly_kind_name(AnomalyKind k) {
  switch (k) {
    case AnomalyKind::Spike: return "spike";
    case AnomalyKind::Scale: return "scale";
    case AnomalyKind::Noise: return "noise";
    case AnomalyKind::TrendShift: return "trend_shift";
    case AnomalyKind::SegmentShuffle: return "segment_shuffle";
  }
  return "spike";
}

AnomalyKind anomaly_kind_from_name(const std::string& name) {
  if (name == "spike") return AnomalyKind::Spike;
  if (name == "scale") return AnomalyKind::Scale;
  if (name == "noise") return AnomalyKind::Noise;
  if (name == "trend_shift") return AnomalyKind::TrendShift;
  if (name == "segment_shuffle") return AnomalyKind::SegmentShuffle;
  throw std::invalid_argument("unknown anomaly kind: " + name);
}

const char* segment_kind_name(SegmentKind k) {
  switch (k) {
    case SegmentKind::LevelShift: return "level_shift";
    case SegmentKind::NoiseBurst: return "noise_burst";
    case SegmentKind::Amplitude: return "amplitude";
    case SegmentKind::FrequencyShift: return "freq_shift";
    case SegmentKind::Flatline: return "flatline";
  }
  return "level_shift";
}

SegmentKind segment_kind_from_name(const std::string& name) {
  if (name == "level_shift") return SegmentKind::LevelShift;
  if (name == "noise_burst") return SegmentKind::NoiseBurst;
  if (name == "amplitude") return SegmentKind::Amplitude;
  if (name == "freq_shift") return SegmentKind::FrequencyShift;
  if (name == "flatline") return SegmentKind::Flatline;
  throw std::invalid_argument("unknown segment kind: " + name);
}

}  // namespace

json run_config_to_json(const RunConfig& cfg) {
  json kinds = json::array();
  for (AnomalyKind k : cfg.injection.kinds) kinds.push_back(anomaly_kind_name(k));
  return json{{"train_csv", cfg.train_csv},
              {"train_labels", cfg.train_labels},
              {"test_csv", cfg.test_csv},
              {"test_labels", cfg.test_labels},
              {"model", cfg.model_path},
              {"out", cfg.out},
              {"window_length", cfg.window_length},
              {"stride", cfg.stride},
              {"test_stride", cfg.test_stride},
              {"nu_grid", cfg.nu_grid},
              {"q_grid", cfg.q_grid},
              {"c3_grid", cfg.c3_grid},
              {"c1", cfg.c1},
              {"c2", cfg.c2},
              {"k_neighbours", cfg.k_neighbours},
              {"jitter", cfg.jitter},
              {"refinement", cfg.refinement},
              {"normalise_kernel", cfg.normalise_kernel},
              {"width_scope", cfg.width_scope == WidthScope::Points ? "points" : "windows"},
              {"fallback_width", cfg.fallback_width},
              {"val_fraction", cfg.val_fraction},
              {"injection",
               {{"kinds", kinds},
                {"magnitude", cfg.injection.magnitude},
                {"seed", cfg.injection.seed},
                {"count", cfg.injection.count}}},
              {"solver",
               {{"max_iters", cfg.solver.max_iters},
                {"tol", cfg.solver.tol},
                {"initial_step", cfg.solver.initial_step}}},
              {"seed", cfg.seed},
              {"threads", cfg.threads}};
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  cfg.train_csv = j.value("train_csv", cfg.train_csv);
  cfg.train_labels = j.value("train_labels", cfg.train_labels);
  cfg.test_csv = j.value("test_csv", cfg.test_csv);
  cfg.test_labels = j.value("test_labels", cfg.test_labels);
  cfg.model_path = j.value("model", cfg.model_path);
  cfg.out = j.value("out", cfg.out);
  cfg.window_length = j.value("window_length", cfg.window_length);
  cfg.stride = j.value("stride", cfg.stride);
  cfg.test_stride = j.value("test_stride", cfg.test_stride);
  cfg.nu_grid = j.value("nu_grid", cfg.nu_grid);
  cfg.q_grid = j.value("q_grid", cfg.q_grid);
  cfg.c3_grid = j.value("c3_grid", cfg.c3_grid);
  cfg.c1 = j.value("c1", cfg.c1);
  cfg.c2 = j.value("c2", cfg.c2);
  cfg.k_neighbours = j.value("k_neighbours", cfg.k_neighbours);
  cfg.jitter = j.value("jitter", cfg.jitter);
  cfg.refinement = j.value("refinement", cfg.refinement);
  cfg.normalise_kernel = j.value("normalise_kernel", cfg.normalise_kernel);
  std::string scope = j.value("width_scope", "points");
  if (scope == "points")
    cfg.width_scope = WidthScope::Points;
  else if (scope == "windows")
    cfg.width_scope = WidthScope::Windows;
  else
    throw std::invalid_argument("width_scope must be 'points' or 'windows'");
  cfg.fallback_width = j.value("fallback_width", cfg.fallback_width);
  cfg.val_fraction = j.value("val_fraction", cfg.val_fraction);
  if (j.contains("injection")) {
    const json& inj = j.at("injection");
    if (inj.contains("kinds")) {
      cfg.injection.kinds.clear();
      for (const auto& k : inj.at("kinds"))
        cfg.injection.kinds.push_back(anomaly_kind_from_name(k.get<std::string>()));
    }
    cfg.injection.magnitude = inj.value("magnitude", cfg.injection.magnitude);
    cfg.injection.seed = inj.value("seed", cfg.injection.seed);
    cfg.injection.count = inj.value("count", cfg.injection.count);
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    cfg.solver.max_iters = s.value("max_iters", cfg.solver.max_iters);
    cfg.solver.tol = s.value("tol", cfg.solver.tol);
    cfg.solver.initial_step = s.value("initial_step", cfg.solver.initial_step);
  }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.threads = j.value("threads", cfg.threads);
  if (cfg.nu_grid.empty() || cfg.q_grid.empty() || cfg.c3_grid.empty())
    throw std::invalid_argument("run config: grids must be nonempty");
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_run_config: cannot open " + path);
  json j;
  f >> j;
  return run_config_from_json(j);
}

namespace {

SolveOptions to_solve_options(const SolverSettings& s) {
  SolveOptions o;
  o.max_iters = s.max_iters;
  o.tol = s.tol;
  o.initial_step = s.initial_step;
  return o;
}

// Even subsample of the time-sample points of the windows, capped.
Matrix sample_points(const std::vector<Path>& windows, int cap) {
  long long total = 0;
  for (const Path& w : windows) total += w.length();
  const int d = windows.front().channels();
  long long step = std::max(1ll, (total + cap - 1) / cap);
  Matrix out(std::min<long long>(cap, (total + step - 1) / step), d);
  long long idx = 0;
  Eigen::Index row = 0;
  for (const Path& w : windows)
    for (int t = 0; t < w.length(); ++t, ++idx)
      if (idx % step == 0 && row < out.rows()) out.row(row++) = w.values.row(t);
  return out.topRows(row);
}

double pipeline_width(const RunConfig& cfg, const std::vector<Path>& positive_windows) {
  if (cfg.width_scope == WidthScope::Windows)
    return rbf_width_heuristic(positive_windows, cfg.fallback_width);
  return mean_pairwise_distance(sample_points(positive_windows, 2000), cfg.fallback_width);
}

// Symmetrised block of the normalised full matrix, with jitter and PD check.
GramMatrix block_gram(const Matrix& norm_entries, Eigen::Index start, Eigen::Index n, double jitter) {
  Matrix block = norm_entries.block(start, start, n, n);
  return gram_from_raw(block, /*normalise=*/false, jitter);
}

struct GridKey {
  double ap, c3, nu, q;
};

// Higher AU-PR wins; ties go to smaller c3, then smaller nu, then q closest
// to 2, then smaller q.
bool better(const GridKey& a, const GridKey& b) {
  if (a.ap != b.ap) return a.ap > b.ap;
  if (a.c3 != b.c3) return a.c3 < b.c3;
  if (a.nu != b.nu) return a.nu < b.nu;
  double da = std::abs(a.q - 2.0), db = std::abs(b.q - 2.0);
  if (da != db) return da < db;
  return a.q < b.q;
}

WindowSet keep_normals(const WindowSet& ws, int* dropped) {
  WindowSet out;
  int drop = 0;
  for (int i = 0; i < ws.size(); ++i) {
    if (ws.labels[static_cast<std::size_t>(i)] == 1) {
      out.windows.push_back(ws.windows[static_cast<std::size_t>(i)]);
      out.labels.push_back(1);
      out.origins.push_back(ws.origins[static_cast<std::size_t>(i)]);
    } else {
      ++drop;
    }
  }
  if (dropped != nullptr) *dropped = drop;
  return out;
}

void append_set(WindowSet& dst, const WindowSet& src) {
  dst.windows.insert(dst.windows.end(), src.windows.begin(), src.windows.end());
  dst.labels.insert(dst.labels.end(), src.labels.begin(), src.labels.end());
  dst.origins.insert(dst.origins.end(), src.origins.begin(), src.origins.end());
}

}  // namespace

TrainResult run_train(const RunConfig& cfg) {
  RawSeries series = read_series_csv(cfg.train_csv);
  if (!cfg.train_labels.empty()) read_point_labels(cfg.train_labels, series);
  NormalisedSeries norm = normalise_series(series);

  WindowSet all = window(norm.series, cfg.window_length, cfg.stride);
  int dropped = 0;
  WindowSet normals = keep_normals(all, &dropped);
  if (normals.size() < 4) throw std::runtime_error("run_train: fewer than 4 normal training windows");

  SplitResult split = train_val_split(normals, cfg.val_fraction, cfg.seed);

  std::uint64_t inj_seed = cfg.injection.seed != 0 ? cfg.injection.seed : cfg.seed;
  AnomalyInjectionConfig inj_tr;
  inj_tr.kinds = cfg.injection.kinds;
  inj_tr.magnitude = cfg.injection.magnitude;
  inj_tr.seed = inj_seed + 1;
  inj_tr.count = cfg.injection.count > 0 ? cfg.injection.count : std::max(1, split.train.size() / 4);
  AnomalyInjectionConfig inj_va = inj_tr;
  inj_va.seed = inj_seed + 2;
  inj_va.count = cfg.injection.count > 0
                     ? std::max(1, static_cast<int>(std::lround(static_cast<double>(cfg.injection.count) *
                                                                split.val.size() / split.train.size())))
                     : std::max(1, split.val.size() / 4);
  WindowSet pseudo_tr = inject_pseudo_anomalies(split.train, inj_tr);
  WindowSet pseudo_va = inject_pseudo_anomalies(split.val, inj_va);

  // fit block first, then validation block, so sub-Grams are contiguous
  WindowSet combined;
  append_set(combined, split.train);
  append_set(combined, pseudo_tr);
  const int n_fit = combined.size();
  append_set(combined, split.val);
  append_set(combined, pseudo_va);
  const int n_all = combined.size();

  StaticKernelConfig scfg;
  scfg.kind = StaticKernelKind::Rbf;
  scfg.width = pipeline_width(cfg, split.train.windows);
  scfg.fallback_width = cfg.fallback_width;
  SigKernelConfig kcfg;
  kcfg.refinement = cfg.refinement;
  kcfg.normalise = cfg.normalise_kernel;

  Matrix raw = raw_signature_gram(combined.windows, combined.windows, scfg, kcfg, cfg.threads);
  Matrix entries = raw;
  if (kcfg.normalise) {
    Vector diag = raw.diagonal();
    for (Eigen::Index i = 0; i < raw.rows(); ++i)
      for (Eigen::Index j = 0; j < raw.cols(); ++j)
        entries(i, j) = normalise_kernel(raw(i, j), diag[i], diag[j]);
  }
  Matrix entries_sym = 0.5 * (entries + entries.transpose());

  GramMatrix gram_fit = block_gram(entries, 0, n_fit, cfg.jitter);
  Vector y_fit(n_fit);
  for (int i = 0; i < n_fit; ++i) y_fit[i] = combined.labels[static_cast<std::size_t>(i)] >= 0 ? 1.0 : -1.0;
  std::vector<int> val_labels(combined.labels.begin() + n_fit, combined.labels.end());

  int k = std::min(cfg.k_neighbours, n_fit - 1);
  Laplacian L_fit = laplacian(build_knn_graph(
      std::vector<Path>(combined.windows.begin(), combined.windows.begin() + n_fit), k, scfg.width));

  Matrix cross = entries_sym.block(n_fit, 0, n_all - n_fit, n_fit);
  Vector val_self(n_all - n_fit);
  for (Eigen::Index i = 0; i < val_self.size(); ++i)
    val_self[i] = kcfg.normalise ? 1.0 : raw(n_fit + i, n_fit + i);

  SolveOptions opts = to_solve_options(cfg.solver);
  TrainResult result;
  std::vector<double> grid_c3, grid_trace_gap, grid_min_eig_q;
  GridKey best{-1.0, 0.0, 0.0, 0.0};
  for (double c3 : cfg.c3_grid) {
    EffectiveKernel Q = effective_kernel(gram_fit.entries, L_fit, c3);
    EffectiveKernelReport qrep = verify_effective_kernel(gram_fit.entries, Q, L_fit);
    grid_c3.push_back(c3);
    grid_trace_gap.push_back(qrep.trace_gap);
    grid_min_eig_q.push_back(qrep.min_eigenvalue);
    for (double nu : cfg.nu_grid) {
      for (double q : cfg.q_grid) {
        HyperParams hp{q, cfg.c1, cfg.c2, c3, nu};
        DualSolution sol = train_dual(gram_fit.entries, L_fit.entries, Q, y_fit, hp, opts);
        double quad = 0.25 * sol.beta.dot(gram_fit.entries * sol.beta);
        Vector d_val = val_self - cross * sol.beta + Vector::Constant(val_self.size(), quad);
        std::vector<double> val_scores(static_cast<std::size_t>(d_val.size()));
        for (Eigen::Index i = 0; i < d_val.size(); ++i)
          val_scores[static_cast<std::size_t>(i)] = d_val[i] - sol.r2;
        GridPointResult gp;
        gp.c3 = c3;
        gp.nu = nu;
        gp.q = q;
        gp.val_au_pr = au_pr(val_scores, val_labels);
        gp.converged = sol.converged;
        gp.radius_fallback = sol.radius_fallback;
        result.grid.push_back(gp);
        if (!sol.converged)
          std::cerr << "warning: solver did not converge at c3=" << c3 << " nu=" << nu
                    << " q=" << q << "\n";
        GridKey key{gp.val_au_pr, c3, nu, q};
        if (better(key, best)) {
          best = key;
          result.selected = gp;
        }
      }
    }
  }

  // retrain on the full training data (all normals plus all pseudo-negatives)
  GramMatrix gram_all = block_gram(entries, 0, n_all, cfg.jitter);
  HyperParams hp_best{best.q, cfg.c1, cfg.c2, best.c3, best.nu};
  Model model = train_model_from_gram(gram_all, raw, combined.windows, combined.labels, scfg, kcfg,
                                      hp_best, std::min(cfg.k_neighbours, n_all - 1), scfg.width,
                                      opts);
  model.scale = norm.scale;
  model.diag.grid_c3 = grid_c3;
  model.diag.grid_trace_gap = grid_trace_gap;
  model.diag.grid_min_eigenvalue_q = grid_min_eig_q;
  result.model = std::move(model);

  json grid_json = json::array();
  for (const auto& gp : result.grid)
    grid_json.push_back({{"c3", gp.c3},
                         {"nu", gp.nu},
                         {"q", gp.q},
                         {"val_au_pr", gp.val_au_pr},
                         {"converged", gp.converged},
                         {"radius_fallback", gp.radius_fallback}});
  result.report = json{
      {"selected_hyperparams",
       {{"q", best.q}, {"c1", cfg.c1}, {"c2", cfg.c2}, {"c3", best.c3}, {"nu", best.nu}}},
      {"validation_au_pr", best.ap},
      {"grid", grid_json},
      {"sigma", scfg.width},
      {"scale", norm.scale},
      {"windows", {{"train_normal", split.train.size()},
                   {"train_pseudo", pseudo_tr.size()},
                   {"val_normal", split.val.size()},
                   {"val_pseudo", pseudo_va.size()},
                   {"dropped_anomalous", dropped}}},
      {"diagnostics",
       {{"trace_gap", grid_trace_gap},
        {"min_eig_Q", grid_min_eig_q},
        {"kkt_residual", result.model.diag.kkt_residual},
        {"identity_residual", result.model.diag.identity_residual},
        {"gram_asymmetry", result.model.diag.gram_asymmetry},
        {"gram_min_eigenvalue", result.model.diag.gram_min_eigenvalue},
        {"solver_converged", result.model.diag.solver_converged}}}};

  if (!cfg.model_path.empty()) save_model(result.model, cfg.model_path);
  return result;
}

json run_score(const RunConfig& cfg, const Model& model) {
  if (cfg.test_csv.empty()) throw std::invalid_argument("run_score: test_csv required");
  if (cfg.test_labels.empty()) throw std::invalid_argument("run_score: test_labels required");
  RawSeries test = read_series_csv(cfg.test_csv);
  read_point_labels(cfg.test_labels, test);
  if (model.train_windows.empty()) throw std::invalid_argument("run_score: empty model");
  if (test.channels() != model.train_windows.front().channels())
    throw std::invalid_argument("run_score: test channel count mismatch with the model");
  test.values /= model.scale;  // training normalisation scale, not refit

  int stride = cfg.test_stride > 0 ? cfg.test_stride : cfg.stride;
  WindowSet ws = window(test, model.train_windows.front().length(), stride);
  std::vector<double> scores = score_all(ws.windows, model, cfg.threads);

  MetricsReport rep = metrics_report({scores}, {ws.labels}, 0.0);
  json out;
  out["metrics"] = {{"precision", rep.prf.precision},
                    {"recall", rep.prf.recall},
                    {"f1", rep.prf.f1},
                    {"au_pr", rep.au_pr},
                    {"g_mean", rep.g_mean}};
  out["confusion"] = {{"tp", rep.aggregate.tp},
                      {"fp", rep.aggregate.fp},
                      {"tn", rep.aggregate.tn},
                      {"fn", rep.aggregate.fn}};
  out["diagnostics"] = {{"trace_gap", model.diag.grid_trace_gap},
                        {"min_eig_Q", model.diag.grid_min_eigenvalue_q},
                        {"kkt_residual", model.diag.kkt_residual}};
  out["selected_hyperparams"] = {{"q", model.hp.q},
                                 {"c1", model.hp.c1},
                                 {"c2", model.hp.c2},
                                 {"c3", model.hp.c3},
                                 {"nu", model.hp.nu}};
  out["per_window_scores"] = scores;
  out["per_window_origins"] = ws.origins;
  out["per_window_labels"] = ws.labels;
  return out;
}

json run_diagnostics(const RunConfig& cfg) {
  RawSeries series = read_series_csv(cfg.train_csv);
  if (!cfg.train_labels.empty()) read_point_labels(cfg.train_labels, series);
  NormalisedSeries norm = normalise_series(series);
  WindowSet all = window(norm.series, cfg.window_length, cfg.stride);
  WindowSet normals = keep_normals(all, nullptr);
  if (normals.size() < 2) throw std::runtime_error("run_diagnostics: need at least 2 normal windows");

  StaticKernelConfig scfg;
  scfg.kind = StaticKernelKind::Rbf;
  scfg.width = pipeline_width(cfg, normals.windows);
  scfg.fallback_width = cfg.fallback_width;
  SigKernelConfig kcfg;
  kcfg.refinement = cfg.refinement;
  kcfg.normalise = cfg.normalise_kernel;

  GramMatrix gram = gram_matrix(normals.windows, scfg, kcfg, cfg.jitter, cfg.threads);
  int k = std::min(cfg.k_neighbours, normals.size() - 1);
  Laplacian L = laplacian(build_knn_graph(normals.windows, k, scfg.width));
  double lambda_cap = default_lambda_cap(gram.entries);
  double bound_k = rademacher_bound(lambda_cap, gram.entries);

  std::vector<double> c3s = {0.0};
  for (double c3 : cfg.c3_grid)
    if (c3 != 0.0) c3s.push_back(c3);

  json rows = json::array();
  for (double c3 : c3s) {
    EffectiveKernel Q = effective_kernel(gram.entries, L, c3);
    EffectiveKernelReport rep = verify_effective_kernel(gram.entries, Q, L);
    rows.push_back({{"c3", c3},
                    {"symmetry_residual", rep.symmetry_residual},
                    {"min_eig_Q", rep.min_eigenvalue},
                    {"trace_gap", rep.trace_gap},
                    {"bound_K", bound_k},
                    {"bound_Q", rademacher_bound(lambda_cap, Q.q)},
                    {"flags", rep.flags}});
  }
  return json{{"n_windows", normals.size()},
              {"sigma", scfg.width},
              {"lambda_cap", lambda_cap},
              {"gram_min_eigenvalue", gram.min_eigenvalue},
              {"gram_asymmetry", gram.asymmetry},
              {"laplacian_trace", L.entries.trace()},
              {"rows", rows}};
}

SynthConfig synth_config_from_json(const json& j) {
  SynthConfig cfg;
  cfg.T = j.value("T", cfg.T);
  cfg.d = j.value("d", cfg.d);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.split_at = j.value("split_at", cfg.split_at);
  if (j.contains("anomalies"))
    for (const auto& a : j.at("anomalies")) {
      AnomalySegment seg;
      seg.begin = a.at("begin").get<int>();
      seg.end = a.at("end").get<int>();
      seg.kind = segment_kind_from_name(a.value("kind", "level_shift"));
      seg.magnitude = a.value("magnitude", 1.0);
      cfg.anomalies.push_back(seg);
    }
  return cfg;
}

json synth_config_to_json(const SynthConfig& cfg) {
  json anomalies = json::array();
  for (const auto& seg : cfg.anomalies)
    anomalies.push_back({{"begin", seg.begin},
                         {"end", seg.end},
                         {"kind", segment_kind_name(seg.kind)},
                         {"magnitude", seg.magnitude}});
  return json{{"T", cfg.T}, {"d", cfg.d}, {"seed", cfg.seed}, {"split_at", cfg.split_at},
              {"anomalies", anomalies}};
}

void run_synth(const SynthConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  RawSeries s = synthetic_benchmark(cfg.seed, cfg.T, cfg.d, cfg.anomalies);
  write_series_csv(s, (fs::path(out_dir) / "series.csv").string());
  write_point_labels(s, (fs::path(out_dir) / "labels.csv").string());
  if (cfg.split_at > 0) {
    if (cfg.split_at >= cfg.T) throw std::invalid_argument("run_synth: split_at out of range");
    RawSeries train, test;
    train.values = s.values.topRows(cfg.split_at);
    train.point_labels.assign(s.point_labels.begin(), s.point_labels.begin() + cfg.split_at);
    test.values = s.values.bottomRows(cfg.T - cfg.split_at);
    test.point_labels.assign(s.point_labels.begin() + cfg.split_at, s.point_labels.end());
    for (int lab : train.point_labels)
      if (lab != 0) {
        std::cerr << "warning: anomalous points before split_at end up in the training half\n";
        break;
      }
    write_series_csv(train, (fs::path(out_dir) / "train.csv").string());
    write_series_csv(test, (fs::path(out_dir) / "test.csv").string());
    write_point_labels(test, (fs::path(out_dir) / "test_labels.csv").string());
  }
}

}  // namespace sigsvdd
