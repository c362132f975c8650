#include "sigsvdd/sigkernel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "sigsvdd/parallel.hpp"

namespace sigsvdd {

double static_kernel(const Vector& a, const Vector& b, const StaticKernelConfig& cfg) {
  if (a.size() != b.size()) throw std::invalid_argument("static_kernel: dimension mismatch");
  if (!a.allFinite() || !b.allFinite()) throw std::invalid_argument("static_kernel: non-finite input");
  if (cfg.kind == StaticKernelKind::Linear) return a.dot(b);
  if (cfg.width <= 0.0) throw std::invalid_argument("static_kernel: width must be positive");
  return std::exp(-(a - b).squaredNorm() / (2.0 * cfg.width * cfg.width));
}

double mean_pairwise_distance(const Matrix& rows, double fallback) {
  const Eigen::Index n = rows.rows();
  if (n < 2) throw std::invalid_argument("mean_pairwise_distance: need at least 2 rows");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) sum += (rows.row(i) - rows.row(j)).norm();
  double mean = sum / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
  return mean < 1e-12 ? fallback : mean;
}

double rbf_width_heuristic(const std::vector<Path>& windows, double fallback_width) {
  if (windows.size() < 2) throw std::invalid_argument("rbf_width_heuristic: need at least 2 windows");
  return mean_pairwise_distance(flatten_all(windows), fallback_width);
}

Path refine_path(const Path& p, int refinement) {
  if (refinement < 1) throw std::invalid_argument("refine_path: refinement must be >= 1");
  if (refinement == 1) return p;
  const Eigen::Index steps = p.values.rows() - 1;
  Matrix out(steps * refinement + 1, p.values.cols());
  for (Eigen::Index t = 0; t < steps; ++t)
    for (int s = 0; s < refinement; ++s) {
      double a = static_cast<double>(s) / refinement;
      out.row(t * refinement + s) = (1.0 - a) * p.values.row(t) + a * p.values.row(t + 1);
    }
  out.row(steps * refinement) = p.values.row(steps);
  return Path{std::move(out)};
}

namespace {

// One row of static kernel values between point x and every row of Y.
void theta_row(const Eigen::RowVectorXd& x, const Matrix& Y, const StaticKernelConfig& cfg,
               Vector& out) {
  if (cfg.kind == StaticKernelKind::Linear) {
    out.noalias() = Y * x.transpose();
  } else {
    out = ((Y.rowwise() - x).rowwise().squaredNorm() * (-1.0 / (2.0 * cfg.width * cfg.width)))
              .array()
              .exp();
  }
}

// PDE recursion over pre-refined paths.
double sig_kernel_refined(const Matrix& X, const Matrix& Y, const StaticKernelConfig& cfg) {
  const Eigen::Index m1 = X.rows() - 1;
  const Eigen::Index m2 = Y.rows() - 1;
  Vector th_prev(m2 + 1), th_cur(m2 + 1), k_prev(m2 + 1), k_cur(m2 + 1);
  theta_row(X.row(0), Y, cfg, th_prev);
  k_prev.setOnes();
  for (Eigen::Index i = 0; i < m1; ++i) {
    theta_row(X.row(i + 1), Y, cfg, th_cur);
    k_cur[0] = 1.0;
    for (Eigen::Index j = 0; j < m2; ++j) {
      double cross = th_cur[j + 1] - th_prev[j + 1] - th_cur[j] + th_prev[j];
      k_cur[j + 1] = k_cur[j] + k_prev[j + 1] + (cross - 1.0) * k_prev[j];
    }
    th_prev.swap(th_cur);
    k_prev.swap(k_cur);
  }
  double value = k_prev[m2];
  if (!std::isfinite(value))
    throw std::runtime_error("signature_kernel: non-finite value, rescale the input paths");
  return value;
}

}  // namespace

double signature_kernel(const Path& x, const Path& y, const StaticKernelConfig& scfg,
                        const SigKernelConfig& kcfg) {
  validate_path(x);
  validate_path(y);
  if (x.channels() != y.channels())
    throw std::invalid_argument("signature_kernel: channel count mismatch");
  Path rx = refine_path(x, kcfg.refinement);
  Path ry = refine_path(y, kcfg.refinement);
  return sig_kernel_refined(rx.values, ry.values, scfg);
}

double normalise_kernel(double kxy, double kxx, double kyy) {
  if (!(kxx > 0.0) || !(kyy > 0.0))
    throw std::invalid_argument("normalise_kernel: self-kernels must be positive");
  return kxy / std::sqrt(kxx * kyy);
}

double normalised_signature_kernel(const Path& x, const Path& y, const StaticKernelConfig& scfg,
                                   const SigKernelConfig& kcfg) {
  double kxy = signature_kernel(x, y, scfg, kcfg);
  if (!kcfg.normalise) return kxy;
  double kxx = signature_kernel(x, x, scfg, kcfg);
  double kyy = signature_kernel(y, y, scfg, kcfg);
  return normalise_kernel(kxy, kxx, kyy);
}

Matrix raw_signature_gram(const std::vector<Path>& a, const std::vector<Path>& b,
                          const StaticKernelConfig& scfg, const SigKernelConfig& kcfg,
                          int threads) {
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  std::vector<Path> ra(a.size()), rb(b.size());
  for (int i = 0; i < na; ++i) {
    validate_path(a[i]);
    ra[i] = refine_path(a[i], kcfg.refinement);
  }
  for (int j = 0; j < nb; ++j) {
    validate_path(b[j]);
    rb[j] = refine_path(b[j], kcfg.refinement);
  }
  Matrix raw(na, nb);
  parallel_for(na * nb, threads, [&](int idx) {
    int i = idx / nb, j = idx % nb;
    raw(i, j) = sig_kernel_refined(ra[i].values, rb[j].values, scfg);
  });
  return raw;
}

GramMatrix gram_from_raw(const Matrix& raw, bool normalise, double jitter) {
  if (raw.rows() != raw.cols()) throw std::invalid_argument("gram_from_raw: matrix must be square");
  if (jitter < 0.0) throw std::invalid_argument("gram_from_raw: jitter must be nonnegative");
  const Eigen::Index n = raw.rows();
  Matrix entries = raw;
  if (normalise) {
    Vector diag = raw.diagonal();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        entries(i, j) = normalise_kernel(raw(i, j), diag[i], diag[j]);
  }
  GramMatrix g;
  g.asymmetry = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (g.asymmetry > 1e-6)
    std::cerr << "warning: gram asymmetry " << g.asymmetry << " before symmetrisation\n";
  g.entries = 0.5 * (entries + entries.transpose());
  g.entries.diagonal().array() += jitter;
  g.jitter = jitter;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g.entries, Eigen::EigenvaluesOnly);
  g.min_eigenvalue = eig.eigenvalues().minCoeff();
  if (!(g.min_eigenvalue > 0.0))
    throw std::runtime_error("gram_from_raw: matrix not positive definite after jitter");
  return g;
}

GramMatrix gram_matrix(const std::vector<Path>& windows, const StaticKernelConfig& scfg,
                       const SigKernelConfig& kcfg, double jitter, int threads) {
  if (windows.size() < 2) throw std::invalid_argument("gram_matrix: need at least 2 windows");
  Matrix raw = raw_signature_gram(windows, windows, scfg, kcfg, threads);
  return gram_from_raw(raw, kcfg.normalise, jitter);
}

}  // namespace sigsvdd
