#pragma once

#include "sigsvdd/manifold.hpp"
#include "sigsvdd/path.hpp"

namespace sigsvdd {

struct HyperParams {
  double q = 2.0;   // dual norm exponent, > 1; p = q / (q - 1)
  double c1 = 1.0;  // target penalty weight
  double c2 = 1.0;  // non-target penalty weight
  double c3 = 0.0;  // manifold weight, >= 0
  double nu = 2.0;  // margin trade-off, > 1
};

void validate_hyperparams(const HyperParams& hp);

struct PenaltyConstants {
  double c1_prime;
  double c2_prime;
  double p;
};

/// p = q/(q-1), c' = ((p-1)/p) (c p)^{-1/(p-1)} for each penalty weight.
PenaltyConstants penalty_constants(double q, double c1, double c2);

/// c1' |(1+y) o rho|_q^q + c2' |(1-y) o rho|_q^q + (y o rho)^T Q (y o rho).
double dual_objective(const Vector& rho, const Vector& y, const Matrix& Q, const HyperParams& hp);

Vector dual_gradient(const Vector& rho, const Vector& y, const Matrix& Q, const HyperParams& hp);

/// Euclidean projection onto {rho >= 0, y^T rho = 1, 1^T rho = nu} by
/// Dykstra-corrected alternating projection. Requires both labels present.
Vector project_feasible(const Vector& v, const Vector& y, double nu);

struct SolveOptions {
  int max_iters = 2000;
  double tol = 1e-9;         // step-size termination |rho_{t+1} - rho_t|
  double initial_step = 1.0;
  double backtrack = 0.5;
  double grow = 1.5;
  double armijo = 1e-4;
};

struct SolveResult {
  Vector rho;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Projected gradient descent with backtracking line search from the
/// projected uniform start. Deterministic; objective nonincreasing across
/// accepted steps.
SolveResult solve_dual(const Matrix& Q, const Vector& y, const HyperParams& hp,
                       const SolveOptions& opts = {});

/// Solves (2 c3 L K + I/2) beta = y o rho; beta = 2 (y o rho) when c3 = 0.
Vector recover_beta(const Vector& rho, const Vector& y, const Matrix& K, const Matrix& L,
                    double c3);

/// zeta_j = (rho_j / (c p))^{1/(p-1)} with c = c1 for y = +1, c2 for y = -1.
Vector slack_values(const Vector& rho, const Vector& y, double p, double c1, double c2);

struct RadiusMargin {
  double r2 = 0.0;
  double tau2 = 0.0;
  bool fallback = false;  // set when one side has no support vectors
};

/// r^2 = (A + B)/2, tau^2 = (B - A)/2 with A, B the support-vector averages
/// of (d^2 - zeta) on the positive side and (d^2 + zeta) on the negative.
RadiusMargin radius_and_margin(const Vector& rho, const Vector& zeta, const Vector& y,
                               const Vector& distances, double support_threshold);

struct KktReport {
  double y_residual = 0.0;       // |y^T rho - 1|
  double ones_residual = 0.0;    // |1^T rho - nu|
  double min_rho = 0.0;
  double tangent_residual = 0.0; // norm of -grad projected onto the tangent cone
};

KktReport kkt_report(const Vector& rho, const Vector& y, const Matrix& Q, const HyperParams& hp);

struct DualSolution {
  Vector rho;
  Vector beta;
  Vector zeta;
  double r2 = 0.0;
  double tau2 = 0.0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  double identity_residual = 0.0;  // max |K beta - 2 Q (y o rho)|
  bool converged = false;
  bool radius_fallback = false;
};

/// Full training chain on a precomputed effective kernel: solve the dual,
/// recover beta and slacks, compute training distances and the radius/margin.
DualSolution train_dual(const Matrix& K, const Matrix& L, const EffectiveKernel& Q,
                        const Vector& y, const HyperParams& hp, const SolveOptions& opts = {});
DualSolution train_dual(const Matrix& K, const Matrix& L, const Vector& y, const HyperParams& hp,
                        const SolveOptions& opts = {});

/// Training-window distances d^2_j = K_jj - (K beta)_j + beta^T K beta / 4.
Vector training_distances(const Matrix& K, const Vector& beta);

}  // namespace sigsvdd
