#include "sigsvdd/model.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "sigsvdd/parallel.hpp"

namespace sigsvdd {

using nlohmann::json;

double distance_squared(const Path& x, const Model& m) {
  if (m.train_windows.empty()) throw std::invalid_argument("distance_squared: empty model");
  if (x.channels() != m.train_windows.front().channels())
    throw std::invalid_argument("distance_squared: channel mismatch with the model");
  const int n = static_cast<int>(m.train_windows.size());
  double kxx = 1.0;
  double raw_self = 0.0;
  if (m.sig_cfg.normalise) {
    raw_self = signature_kernel(x, x, m.static_cfg, m.sig_cfg);
  } else {
    kxx = raw_self = signature_kernel(x, x, m.static_cfg, m.sig_cfg);
  }
  double expansion = 0.0;
  for (int j = 0; j < n; ++j) {
    double k = signature_kernel(x, m.train_windows[static_cast<std::size_t>(j)], m.static_cfg,
                                m.sig_cfg);
    if (m.sig_cfg.normalise) k = normalise_kernel(k, raw_self, m.train_self_raw[j]);
    expansion += m.beta[j] * k;
  }
  if (m.sig_cfg.normalise) kxx = normalise_kernel(raw_self, raw_self, raw_self);
  return kxx - expansion + m.quad_term;
}

double score(const Path& x, const Model& m) { return distance_squared(x, m) - m.r2; }

std::vector<double> score_all(const std::vector<Path>& xs, const Model& m, int threads) {
  std::vector<double> out(xs.size());
  parallel_for(static_cast<int>(xs.size()), threads,
               [&](int i) { out[static_cast<std::size_t>(i)] = score(xs[static_cast<std::size_t>(i)], m); });
  return out;
}

Model train_model_from_gram(const GramMatrix& gram, const Matrix& raw_self,
                            const std::vector<Path>& windows, const std::vector<int>& labels,
                            const StaticKernelConfig& scfg, const SigKernelConfig& kcfg,
                            const HyperParams& hp, int knn_k, double graph_width,
                            const SolveOptions& opts) {
  const int n = static_cast<int>(windows.size());
  if (n < 2 || static_cast<int>(labels.size()) != n || gram.n() != n)
    throw std::invalid_argument("train_model_from_gram: inconsistent inputs");
  Vector y(n);
  for (int i = 0; i < n; ++i) y[i] = labels[static_cast<std::size_t>(i)] >= 0 ? 1.0 : -1.0;

  int k = std::min(knn_k, n - 1);
  AdjacencyGraph graph = build_knn_graph(windows, k, graph_width);
  Laplacian L = laplacian(graph);
  EffectiveKernel Q = effective_kernel(gram.entries, L, hp.c3);
  DualSolution sol = train_dual(gram.entries, L.entries, Q, y, hp, opts);

  Model m;
  m.train_windows = windows;
  m.labels = labels;
  m.beta = sol.beta;
  m.train_self_raw = raw_self.diagonal();
  m.r2 = sol.r2;
  m.tau2 = sol.tau2;
  m.quad_term = 0.25 * sol.beta.dot(gram.entries * sol.beta);
  m.static_cfg = scfg;
  m.sig_cfg = kcfg;
  m.hp = hp;
  m.diag.gram_asymmetry = gram.asymmetry;
  m.diag.gram_min_eigenvalue = gram.min_eigenvalue;
  EffectiveKernelReport qrep = verify_effective_kernel(gram.entries, Q, L);
  m.diag.q_min_eigenvalue = qrep.min_eigenvalue;
  m.diag.trace_gap = qrep.trace_gap;
  m.diag.kkt_residual = sol.kkt_residual;
  m.diag.identity_residual = sol.identity_residual;
  m.diag.solver_converged = sol.converged;
  m.diag.radius_fallback = sol.radius_fallback;
  return m;
}

Model train_model(const std::vector<Path>& windows, const std::vector<int>& labels,
                  const StaticKernelConfig& scfg, const SigKernelConfig& kcfg,
                  const HyperParams& hp, int knn_k, double jitter, const SolveOptions& opts,
                  int threads) {
  Matrix raw = raw_signature_gram(windows, windows, scfg, kcfg, threads);
  GramMatrix gram = gram_from_raw(raw, kcfg.normalise, jitter);
  return train_model_from_gram(gram, raw, windows, labels, scfg, kcfg, hp, knn_k, scfg.width,
                               opts);
}

namespace {

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& arr) {
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

}  // namespace

std::string model_to_json_string(const Model& m) {
  json j;
  j["format"] = "sigsvdd-model-v1";
  const int W = m.train_windows.empty() ? 0 : m.train_windows.front().length();
  const int d = m.train_windows.empty() ? 0 : m.train_windows.front().channels();
  j["window_length"] = W;
  j["channels"] = d;
  json wins = json::array();
  for (const Path& w : m.train_windows) wins.push_back(vector_to_json(flatten(w)));
  j["windows"] = wins;
  j["labels"] = m.labels;
  j["beta"] = vector_to_json(m.beta);
  j["train_self_raw"] = vector_to_json(m.train_self_raw);
  j["r2"] = m.r2;
  j["tau2"] = m.tau2;
  j["quad_term"] = m.quad_term;
  j["scale"] = m.scale;
  j["static_kernel"] = {{"kind", m.static_cfg.kind == StaticKernelKind::Rbf ? "rbf" : "linear"},
                        {"width", m.static_cfg.width},
                        {"fallback_width", m.static_cfg.fallback_width}};
  j["sig_kernel"] = {{"refinement", m.sig_cfg.refinement}, {"normalise", m.sig_cfg.normalise}};
  j["hyperparams"] = {{"q", m.hp.q}, {"c1", m.hp.c1}, {"c2", m.hp.c2}, {"c3", m.hp.c3}, {"nu", m.hp.nu}};
  j["diagnostics"] = {{"gram_asymmetry", m.diag.gram_asymmetry},
                      {"gram_min_eigenvalue", m.diag.gram_min_eigenvalue},
                      {"q_min_eigenvalue", m.diag.q_min_eigenvalue},
                      {"trace_gap", m.diag.trace_gap},
                      {"kkt_residual", m.diag.kkt_residual},
                      {"identity_residual", m.diag.identity_residual},
                      {"solver_converged", m.diag.solver_converged},
                      {"radius_fallback", m.diag.radius_fallback},
                      {"grid_c3", m.diag.grid_c3},
                      {"grid_trace_gap", m.diag.grid_trace_gap},
                      {"grid_min_eigenvalue_q", m.diag.grid_min_eigenvalue_q}};
  return j.dump(2);
}

Model model_from_json_string(const std::string& text) {
  json j = json::parse(text);
  if (j.value("format", "") != "sigsvdd-model-v1")
    throw std::invalid_argument("model: unknown format");
  Model m;
  const int W = j.at("window_length").get<int>();
  const int d = j.at("channels").get<int>();
  for (const auto& win : j.at("windows")) {
    Vector flat = vector_from_json(win);
    if (flat.size() != static_cast<Eigen::Index>(W) * d)
      throw std::invalid_argument("model: window size mismatch");
    Matrix vals(W, d);
    Eigen::Index k = 0;
    for (int t = 0; t < W; ++t)
      for (int c = 0; c < d; ++c) vals(t, c) = flat[k++];
    m.train_windows.push_back(Path{std::move(vals)});
  }
  m.labels = j.at("labels").get<std::vector<int>>();
  m.beta = vector_from_json(j.at("beta"));
  m.train_self_raw = vector_from_json(j.at("train_self_raw"));
  m.r2 = j.at("r2").get<double>();
  m.tau2 = j.at("tau2").get<double>();
  m.quad_term = j.at("quad_term").get<double>();
  m.scale = j.at("scale").get<double>();
  const auto& sk = j.at("static_kernel");
  m.static_cfg.kind = sk.at("kind").get<std::string>() == "linear" ? StaticKernelKind::Linear
                                                                   : StaticKernelKind::Rbf;
  m.static_cfg.width = sk.at("width").get<double>();
  m.static_cfg.fallback_width = sk.at("fallback_width").get<double>();
  m.sig_cfg.refinement = j.at("sig_kernel").at("refinement").get<int>();
  m.sig_cfg.normalise = j.at("sig_kernel").at("normalise").get<bool>();
  const auto& hp = j.at("hyperparams");
  m.hp.q = hp.at("q").get<double>();
  m.hp.c1 = hp.at("c1").get<double>();
  m.hp.c2 = hp.at("c2").get<double>();
  m.hp.c3 = hp.at("c3").get<double>();
  m.hp.nu = hp.at("nu").get<double>();
  const auto& dg = j.at("diagnostics");
  m.diag.gram_asymmetry = dg.at("gram_asymmetry").get<double>();
  m.diag.gram_min_eigenvalue = dg.at("gram_min_eigenvalue").get<double>();
  m.diag.q_min_eigenvalue = dg.at("q_min_eigenvalue").get<double>();
  m.diag.trace_gap = dg.at("trace_gap").get<double>();
  m.diag.kkt_residual = dg.at("kkt_residual").get<double>();
  m.diag.identity_residual = dg.at("identity_residual").get<double>();
  m.diag.solver_converged = dg.at("solver_converged").get<bool>();
  m.diag.radius_fallback = dg.at("radius_fallback").get<bool>();
  m.diag.grid_c3 = dg.at("grid_c3").get<std::vector<double>>();
  m.diag.grid_trace_gap = dg.at("grid_trace_gap").get<std::vector<double>>();
  m.diag.grid_min_eigenvalue_q = dg.at("grid_min_eigenvalue_q").get<std::vector<double>>();
  return m;
}

void save_model(const Model& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_model: cannot open " + path);
  f << model_to_json_string(m) << "\n";
}

Model load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_model: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return model_from_json_string(text);
}

}  // namespace sigsvdd
