#pragma once

#include <string>
#include <vector>

#include "sigsvdd/path.hpp"

namespace sigsvdd {

struct AdjacencyGraph {
  Matrix weights;  // symmetric, nonnegative, zero diagonal
  int k_neighbours = 0;
};

/// Gaussian-weighted kNN graph on flattened windows: edge (i, j) exists iff
/// j is among the k nearest of i or vice versa; weight exp(-d^2 / (2 width^2)).
AdjacencyGraph build_knn_graph(const std::vector<Path>& windows, int k, double width);
AdjacencyGraph build_knn_graph_rows(const Matrix& flat_rows, int k, double width);

struct Laplacian {
  Matrix entries;  // L = D - W
};

Laplacian laplacian(const AdjacencyGraph& g);

/// Q = (4 c3 K L + I)^{-1} K, symmetrised after the solve.
struct EffectiveKernel {
  Matrix q;
  double c3 = 0.0;
  double asymmetry = 0.0;  // max |Q - Q^T| before symmetrisation
};

EffectiveKernel effective_kernel(const Matrix& K, const Laplacian& L, double c3);

struct EffectiveKernelReport {
  double symmetry_residual = 0.0;  // max |Q - Q^T| as computed (pre-symmetrisation)
  double min_eigenvalue = 0.0;
  double trace_gap = 0.0;  // trace(K) - trace(Q)
  bool flagged = false;
  std::vector<std::string> flags;
};

EffectiveKernelReport verify_effective_kernel(const Matrix& K, const EffectiveKernel& Q,
                                              const Laplacian& L);

/// (lambda_cap / n) * sqrt(trace(M)); the kernel-hypothesis complexity bound.
double rademacher_bound(double lambda_cap, const Matrix& M);

/// Default cap 2*sqrt(max diagonal of K), from the eta = 2C reparametrisation
/// with unit-norm features.
double default_lambda_cap(const Matrix& K);

}  // namespace sigsvdd
