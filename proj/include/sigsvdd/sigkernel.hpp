#pragma once

#include <vector>

#include "sigsvdd/path.hpp"

namespace sigsvdd {

enum class StaticKernelKind { Rbf, Linear };

struct StaticKernelConfig {
  StaticKernelKind kind = StaticKernelKind::Rbf;
  double width = 1.0;           // RBF length scale, > 0
  double fallback_width = 1.0;  // used when the width heuristic degenerates
};

struct SigKernelConfig {
  int refinement = 2;  // linear sub-steps per original time step, >= 1
  bool normalise = true;
};

/// Pointwise base kernel. Rbf: exp(-|a-b|^2 / (2 width^2)). Linear: a.b.
double static_kernel(const Vector& a, const Vector& b, const StaticKernelConfig& cfg);

/// Mean pairwise Euclidean distance between the rows of `rows`;
/// `fallback` if the mean degenerates (all rows coincide).
double mean_pairwise_distance(const Matrix& rows, double fallback);

/// RBF width heuristic: mean of ||flatten(w_i) - flatten(w_j)|| over i < j.
double rbf_width_heuristic(const std::vector<Path>& windows, double fallback_width = 1.0);

/// Linear interpolation of each time step onto `refinement` sub-steps.
Path refine_path(const Path& p, int refinement);

/// Signature kernel by the forward finite-difference solution of the kernel
/// PDE over the refined grid, boundary values 1. Unnormalised.
double signature_kernel(const Path& x, const Path& y, const StaticKernelConfig& scfg,
                        const SigKernelConfig& kcfg);

/// kxy / sqrt(kxx * kyy); requires positive self-kernels.
double normalise_kernel(double kxy, double kxx, double kyy);

/// signature_kernel with unit-diagonal normalisation applied when
/// kcfg.normalise is set.
double normalised_signature_kernel(const Path& x, const Path& y, const StaticKernelConfig& scfg,
                                   const SigKernelConfig& kcfg);

struct GramMatrix {
  Matrix entries;
  double jitter = 0.0;
  double asymmetry = 0.0;       // max |raw - raw^T| before symmetrisation
  double min_eigenvalue = 0.0;  // of the jittered, symmetrised matrix
  int n() const { return static_cast<int>(entries.rows()); }
};

/// Raw (unnormalised) kernel matrix between two window sets; entry (i, j) is
/// the signature kernel of a[i] and b[j].
Matrix raw_signature_gram(const std::vector<Path>& a, const std::vector<Path>& b,
                          const StaticKernelConfig& scfg, const SigKernelConfig& kcfg,
                          int threads = 0);

/// Normalise (optionally), symmetrise as (A + A^T)/2, add jitter to the
/// diagonal and eigen-check positive definiteness. `raw` must be a square
/// kernel matrix with self-kernels on the diagonal.
GramMatrix gram_from_raw(const Matrix& raw, bool normalise, double jitter);

/// Full Gram pipeline over one window set.
GramMatrix gram_matrix(const std::vector<Path>& windows, const StaticKernelConfig& scfg,
                       const SigKernelConfig& kcfg, double jitter, int threads = 0);

}  // namespace sigsvdd
