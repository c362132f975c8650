// Test-only oracles, independent of the implementation paths they check.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sigsvdd/path.hpp"
#include "sigsvdd/svdd.hpp"

namespace sigsvdd::oracle {

/// Signature tensors of a piecewise linear path up to `level`, by iterated
/// tensor products over segments (Chen concatenation). Element k of the
/// result has d^k entries; element 0 is {1}.
std::vector<Vector> truncated_signature(const Path& p, int level);

/// Concatenation of the tensors above, levels 1..level.
Vector truncated_signature_features(const Path& p, int level);

/// Inner product of truncated signatures, level-0 term included.
double truncated_signature_kernel(const Path& x, const Path& y, int level);

/// Central finite differences of f at x with step h.
Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h);

/// Brute-force minimum of the dual objective over the feasible polytope
/// {rho >= 0, y^T rho = 1, 1^T rho = nu}, enumerated as a product of simplex
/// grids of the given resolution on the positive and negative label blocks.
double grid_min_dual_objective(const Matrix& Q, const Vector& y, const HyperParams& hp,
                               double resolution);

/// Average precision by an exhaustive sweep over distinct-score thresholds,
/// counting tp/fp directly per threshold.
double threshold_sweep_au_pr(const std::vector<double>& scores, const std::vector<int>& labels);

/// Plain scalar-loop dual objective (no linear algebra library calls).
double naive_dual_objective(const std::vector<double>& rho, const std::vector<int>& y,
                            const std::vector<std::vector<double>>& Q, double q, double c1,
                            double c2);

// --- deterministic random instances for property tests ---

/// Unit-diagonal positive-definite matrix resembling a normalised Gram.
Matrix random_pd_kernel(int n, std::uint64_t seed);

/// Smooth random-walk windows, increments bounded by `step`.
std::vector<Path> random_windows(int n, int length, int channels, double step, std::uint64_t seed);

/// +/-1 labels with both classes present.
Vector random_mixed_labels(int n, std::uint64_t seed);

/// Strictly positive feasible point (min entry >= margin).
Vector random_interior_feasible(const Vector& y, double nu, double margin, std::uint64_t seed);

}  // namespace sigsvdd::oracle
