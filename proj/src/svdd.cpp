#include "sigsvdd/svdd.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sigsvdd {

void validate_hyperparams(const HyperParams& hp) {
  if (!(hp.q > 1.0)) throw std::invalid_argument("hyperparams: q must be > 1");
  if (!(hp.nu > 1.0)) throw std::invalid_argument("hyperparams: nu must be > 1");
  if (!(hp.c1 > 0.0) || !(hp.c2 > 0.0)) throw std::invalid_argument("hyperparams: c1, c2 must be positive");
  if (hp.c3 < 0.0) throw std::invalid_argument("hyperparams: c3 must be nonnegative");
}

PenaltyConstants penalty_constants(double q, double c1, double c2) {
  if (!(q > 1.0)) throw std::invalid_argument("penalty_constants: q must be > 1");
  double p = q / (q - 1.0);
  double e = -1.0 / (p - 1.0);
  return {(p - 1.0) / p * std::pow(c1 * p, e), (p - 1.0) / p * std::pow(c2 * p, e), p};
}

namespace {

void check_shapes(const Vector& rho, const Vector& y, const Matrix& Q) {
  if (rho.size() != y.size() || Q.rows() != rho.size() || Q.cols() != rho.size())
    throw std::invalid_argument("dual problem: shape mismatch");
}

bool labels_mixed(const Vector& y) {
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) (y[i] > 0 ? pos : neg) = true;
  return pos && neg;
}

}  // namespace

double dual_objective(const Vector& rho, const Vector& y, const Matrix& Q, const HyperParams& hp) {
  check_shapes(rho, y, Q);
  PenaltyConstants pc = penalty_constants(hp.q, hp.c1, hp.c2);
  double norm_pos = 0.0, norm_neg = 0.0;
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    double r = std::max(rho[i], 0.0);
    if (y[i] > 0)
      norm_pos += std::pow(2.0 * r, hp.q);
    else
      norm_neg += std::pow(2.0 * r, hp.q);
  }
  Vector yr = y.cwiseProduct(rho);
  return pc.c1_prime * norm_pos + pc.c2_prime * norm_neg + yr.dot(Q * yr);
}

Vector dual_gradient(const Vector& rho, const Vector& y, const Matrix& Q, const HyperParams& hp) {
  check_shapes(rho, y, Q);
  PenaltyConstants pc = penalty_constants(hp.q, hp.c1, hp.c2);
  Vector yr = y.cwiseProduct(rho);
  Vector quad = Q * yr;
  Vector g(rho.size());
  double pow2q = std::pow(2.0, hp.q);
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    double r = std::max(rho[i], 0.0);
    double c = y[i] > 0 ? pc.c1_prime : pc.c2_prime;
    g[i] = c * hp.q * pow2q * std::pow(r, hp.q - 1.0) + 2.0 * y[i] * quad[i];
  }
  return g;
}

namespace {

// Projection onto the affine subspace {y^T x = b1, 1^T x = b2} via the 2x2
// normal equations of A = [y^T; 1^T].
struct AffineProjector {
  Vector y;
  double b1, b2;
  double n, s, det;

  AffineProjector(const Vector& y_, double b1_, double b2_) : y(y_), b1(b1_), b2(b2_) {
    n = static_cast<double>(y.size());
    s = y.sum();
    det = n * n - s * s;
    if (std::abs(det) < 1e-12 * n * n)
      throw std::invalid_argument("project_feasible: constraints infeasible, labels of one class only");
  }

  Vector operator()(const Vector& z) const {
    double a1 = y.dot(z) - b1;
    double a2 = z.sum() - b2;
    double l1 = (n * a1 - s * a2) / det;
    double l2 = (n * a2 - s * a1) / det;
    return z - l1 * y - Vector::Constant(z.size(), l2);
  }
};

// Terminates when the constraint residual drops below `tol`; with
// change_tol > 0 additionally requires the iterate to stop moving, which is
// what certifies convergence to the true projection.
Vector dykstra_affine_orthant(const Vector& v, const AffineProjector& affine,
                              const std::vector<bool>* orthant_mask, double tol, int max_iters,
                              double change_tol = 0.0) {
  Vector x = v;
  Vector p = Vector::Zero(v.size());
  Vector q = Vector::Zero(v.size());
  for (int it = 0; it < max_iters; ++it) {
    Vector prev = x;
    Vector z = x + p;
    Vector xa = affine(z);
    p = z - xa;
    Vector w = xa + q;
    Vector xb = w;
    if (orthant_mask == nullptr)
      xb = xb.cwiseMax(0.0);
    else
      for (Eigen::Index i = 0; i < xb.size(); ++i)
        if ((*orthant_mask)[static_cast<std::size_t>(i)]) xb[i] = std::max(xb[i], 0.0);
    q = w - xb;
    x = xb;
    double res = std::max(std::abs(affine.y.dot(x) - affine.b1), std::abs(x.sum() - affine.b2));
    if (res <= tol &&
        (change_tol <= 0.0 || (x - prev).cwiseAbs().maxCoeff() <= change_tol * (1.0 + x.cwiseAbs().maxCoeff())))
      break;
  }
  return x;
}

}  // namespace

Vector project_feasible(const Vector& v, const Vector& y, double nu) {
  if (v.size() != y.size()) throw std::invalid_argument("project_feasible: shape mismatch");
  AffineProjector affine(y, 1.0, nu);
  return dykstra_affine_orthant(v, affine, nullptr, 1e-10, 200000, 1e-12);
}

SolveResult solve_dual(const Matrix& Q, const Vector& y, const HyperParams& hp,
                       const SolveOptions& opts) {
  validate_hyperparams(hp);
  if (!labels_mixed(y)) throw std::invalid_argument("solve_dual: both labels must be present");
  const Eigen::Index n = y.size();
  Vector rho = project_feasible(Vector::Constant(n, hp.nu / static_cast<double>(n)), y, hp.nu);
  double f = dual_objective(rho, y, Q, hp);
  double step = opts.initial_step;
  SolveResult out;
  out.rho = rho;
  out.objective = f;
  int small_streak = 0;
  for (int it = 0; it < opts.max_iters; ++it) {
    out.iterations = it + 1;
    Vector g = dual_gradient(rho, y, Q, hp);
    Vector cand;
    double fc = f;
    bool accepted = false;
    while (step >= 1e-14) {
      cand = project_feasible(rho - step * g, y, hp.nu);
      fc = dual_objective(cand, y, Q, hp);
      if (fc <= f + opts.armijo * g.dot(cand - rho)) {
        accepted = true;
        break;
      }
      step *= opts.backtrack;
    }
    if (!accepted) {  // no descent direction left: stationary
      out.converged = true;
      break;
    }
    double move = (cand - rho).norm();
    rho = cand;
    f = fc;
    out.rho = rho;
    out.objective = f;
    if (move <= opts.tol) {
      // a small move certifies stationarity only at a full step, so retry
      // once from the initial step before terminating
      if (++small_streak >= 2 || step >= opts.initial_step) {
        out.converged = true;
        break;
      }
      step = opts.initial_step;
    } else {
      small_streak = 0;
      step = std::min(step * opts.grow, 1e6);
    }
  }
  return out;
}

Vector recover_beta(const Vector& rho, const Vector& y, const Matrix& K, const Matrix& L,
                    double c3) {
  if (rho.size() != y.size() || K.rows() != rho.size() || L.rows() != rho.size())
    throw std::invalid_argument("recover_beta: shape mismatch");
  Vector rhs = y.cwiseProduct(rho);
  if (c3 == 0.0) return 2.0 * rhs;
  Matrix system = 2.0 * c3 * (L * K);
  system.diagonal().array() += 0.5;
  Eigen::PartialPivLU<Matrix> lu(system);
  Vector beta = lu.solve(rhs);
  double residual = (system * beta - rhs).cwiseAbs().maxCoeff();
  if (!beta.allFinite() || residual > 1e-8 * std::max(1.0, rhs.cwiseAbs().maxCoeff()) * static_cast<double>(rho.size()))
    throw std::runtime_error("recover_beta: singular system");
  return beta;
}

Vector slack_values(const Vector& rho, const Vector& y, double p, double c1, double c2) {
  if (!(p > 1.0)) throw std::invalid_argument("slack_values: p must be > 1");
  Vector zeta(rho.size());
  double e = 1.0 / (p - 1.0);
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    double c = y[i] > 0 ? c1 : c2;
    double r = std::max(rho[i], 0.0);
    zeta[i] = r == 0.0 ? 0.0 : std::pow(r / (c * p), e);
  }
  return zeta;
}

RadiusMargin radius_and_margin(const Vector& rho, const Vector& zeta, const Vector& y,
                               const Vector& distances, double support_threshold) {
  double sum_pos = 0.0, sum_neg = 0.0;
  int n_pos = 0, n_neg = 0;
  for (Eigen::Index j = 0; j < rho.size(); ++j) {
    if (rho[j] <= support_threshold) continue;
    if (y[j] > 0) {
      sum_pos += distances[j] - zeta[j];
      ++n_pos;
    } else {
      sum_neg += distances[j] + zeta[j];
      ++n_neg;
    }
  }
  if (n_pos == 0 && n_neg == 0)
    throw std::runtime_error("radius_and_margin: no support vectors");
  RadiusMargin rm;
  if (n_pos > 0 && n_neg > 0) {
    double a = sum_pos / n_pos, b = sum_neg / n_neg;
    rm.r2 = 0.5 * (a + b);
    rm.tau2 = 0.5 * (b - a);
  } else {
    rm.r2 = n_pos > 0 ? sum_pos / n_pos : sum_neg / n_neg;
    rm.tau2 = 0.0;
    rm.fallback = true;
  }
  return rm;
}

KktReport kkt_report(const Vector& rho, const Vector& y, const Matrix& Q, const HyperParams& hp) {
  KktReport rep;
  rep.y_residual = std::abs(y.dot(rho) - 1.0);
  rep.ones_residual = std::abs(rho.sum() - hp.nu);
  rep.min_rho = rho.minCoeff();
  Vector g = dual_gradient(rho, y, Q, hp);
  // tangent cone at rho: {d : y^T d = 0, 1^T d = 0, d_i >= 0 on active i}
  double act_tol = 1e-10 * std::max(1.0, hp.nu);
  std::vector<bool> active(static_cast<std::size_t>(rho.size()));
  for (Eigen::Index i = 0; i < rho.size(); ++i) active[static_cast<std::size_t>(i)] = rho[i] <= act_tol;
  AffineProjector affine(y, 0.0, 0.0);
  Vector d = dykstra_affine_orthant(-g, affine, &active, 1e-14, 200000, 1e-13);
  rep.tangent_residual = d.norm();
  return rep;
}

Vector training_distances(const Matrix& K, const Vector& beta) {
  Vector kb = K * beta;
  double quad = 0.25 * beta.dot(kb);
  return K.diagonal() - kb + Vector::Constant(K.rows(), quad);
}

DualSolution train_dual(const Matrix& K, const Matrix& L, const EffectiveKernel& Q,
                        const Vector& y, const HyperParams& hp, const SolveOptions& opts) {
  validate_hyperparams(hp);
  SolveResult sr = solve_dual(Q.q, y, hp, opts);
  DualSolution sol;
  sol.rho = sr.rho;
  sol.converged = sr.converged;
  sol.objective = sr.objective;
  sol.beta = recover_beta(sol.rho, y, K, L, hp.c3);
  PenaltyConstants pc = penalty_constants(hp.q, hp.c1, hp.c2);
  sol.zeta = slack_values(sol.rho, y, pc.p, hp.c1, hp.c2);
  Vector dist = training_distances(K, sol.beta);
  RadiusMargin rm = radius_and_margin(sol.rho, sol.zeta, y, dist, 1e-8 * hp.nu);
  sol.r2 = rm.r2;
  sol.tau2 = rm.tau2;
  sol.radius_fallback = rm.fallback;
  KktReport kkt = kkt_report(sol.rho, y, Q.q, hp);
  sol.kkt_residual = std::max({kkt.y_residual, kkt.ones_residual, std::max(0.0, -kkt.min_rho),
                               kkt.tangent_residual});
  Vector yr = y.cwiseProduct(sol.rho);
  sol.identity_residual = (K * sol.beta - 2.0 * (Q.q * yr)).cwiseAbs().maxCoeff();
  return sol;
}

DualSolution train_dual(const Matrix& K, const Matrix& L, const Vector& y, const HyperParams& hp,
                        const SolveOptions& opts) {
  EffectiveKernel Q = effective_kernel(K, Laplacian{L}, hp.c3);
  return train_dual(K, L, Q, y, hp, opts);
}

}  // namespace sigsvdd
