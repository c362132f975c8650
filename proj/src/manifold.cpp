#include "sigsvdd/manifold.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sigsvdd {

AdjacencyGraph build_knn_graph_rows(const Matrix& flat_rows, int k, double width) {
  const int n = static_cast<int>(flat_rows.rows());
  if (k < 1 || k >= n) throw std::invalid_argument("build_knn_graph: need 1 <= k < n");
  if (width <= 0.0) throw std::invalid_argument("build_knn_graph: width must be positive");
  Matrix d2(n, n);
  for (int i = 0; i < n; ++i) {
    d2(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      double v = (flat_rows.row(i) - flat_rows.row(j)).squaredNorm();
      d2(i, j) = v;
      d2(j, i) = v;
    }
  }
  AdjacencyGraph g;
  g.k_neighbours = k;
  g.weights = Matrix::Zero(n, n);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    // ties broken by index for determinism
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (d2(i, a) != d2(i, b)) return d2(i, a) < d2(i, b);
      return a < b;
    });
    int taken = 0;
    for (int j : order) {
      if (j == i) continue;
      double w = std::exp(-d2(i, j) / (2.0 * width * width));
      g.weights(i, j) = w;
      g.weights(j, i) = w;
      if (++taken == k) break;
    }
  }
  return g;
}

AdjacencyGraph build_knn_graph(const std::vector<Path>& windows, int k, double width) {
  return build_knn_graph_rows(flatten_all(windows), k, width);
}

Laplacian laplacian(const AdjacencyGraph& g) {
  Matrix L = -g.weights;
  L.diagonal() = g.weights.rowwise().sum();
  return Laplacian{std::move(L)};
}

EffectiveKernel effective_kernel(const Matrix& K, const Laplacian& L, double c3) {
  if (K.rows() != K.cols() || L.entries.rows() != K.rows() || L.entries.cols() != K.cols())
    throw std::invalid_argument("effective_kernel: shape mismatch");
  if (c3 < 0.0) throw std::invalid_argument("effective_kernel: c3 must be nonnegative");
  EffectiveKernel out;
  out.c3 = c3;
  if (c3 == 0.0) {
    out.q = K;
    return out;
  }
  const Eigen::Index n = K.rows();
  Matrix system = 4.0 * c3 * (K * L.entries);
  system.diagonal().array() += 1.0;
  Eigen::PartialPivLU<Matrix> lu(system);
  Matrix q = lu.solve(K);
  double residual = (system * q - K).cwiseAbs().maxCoeff();
  double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  if (!q.allFinite() || residual > 1e-6 * scale * static_cast<double>(n))
    throw std::runtime_error("effective_kernel: singular or ill-conditioned system");
  out.asymmetry = (q - q.transpose()).cwiseAbs().maxCoeff();
  out.q = 0.5 * (q + q.transpose());
  return out;
}

EffectiveKernelReport verify_effective_kernel(const Matrix& K, const EffectiveKernel& Q,
                                              const Laplacian& L) {
  EffectiveKernelReport rep;
  rep.symmetry_residual = std::max(Q.asymmetry, (Q.q - Q.q.transpose()).cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (Q.q + Q.q.transpose()), Eigen::EigenvaluesOnly);
  rep.min_eigenvalue = eig.eigenvalues().minCoeff();
  rep.trace_gap = K.trace() - Q.q.trace();
  if (!(rep.min_eigenvalue > 0.0)) rep.flags.push_back("q_not_positive_definite");
  if (Q.c3 > 0.0 && L.entries.trace() > 0.0 && !(rep.trace_gap > 0.0))
    rep.flags.push_back("trace_gap_not_positive");
  if (Q.c3 == 0.0 && std::abs(rep.trace_gap) > 1e-8) rep.flags.push_back("trace_gap_nonzero_at_c3_zero");
  rep.flagged = !rep.flags.empty();
  return rep;
}

double rademacher_bound(double lambda_cap, const Matrix& M) {
  if (lambda_cap <= 0.0) throw std::invalid_argument("rademacher_bound: lambda_cap must be positive");
  if (M.rows() != M.cols()) throw std::invalid_argument("rademacher_bound: matrix must be square");
  double tr = M.trace();
  if (!(tr > 0.0)) throw std::invalid_argument("rademacher_bound: trace must be positive");
  return lambda_cap / static_cast<double>(M.rows()) * std::sqrt(tr);
}

double default_lambda_cap(const Matrix& K) { return 2.0 * std::sqrt(K.diagonal().maxCoeff()); }

}  // namespace sigsvdd
