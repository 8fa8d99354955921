#pragma once

#include <limits>
#include <optional>

#include "cenlad/core_model.hpp"

namespace cenlad {

enum class SolverMethod {
  /// Mehrotra predictor-corrector on the LP form, gap-certified.
  kInteriorPoint,
  /// Operator splitting (ADMM) with a cached factorization.
  kAdmm,
};

struct SolverOptions {
  SolverMethod method = SolverMethod::kInteriorPoint;
  double penalty_rho = 1.0;
  double tol_primal = 1e-7;
  double tol_dual = 1e-7;
  int max_iter = 20000;
  /// Radius R of the feasible set {||beta||_1 <= R}; +inf disables it.
  double l1_radius = 1e6;
  /// Multiply/divide rho by 2 when the residual ratio exceeds 10.
  bool residual_balancing = true;

  void validate() const;
};

struct SolverDiagnostics {
  SolverMethod method = SolverMethod::kInteriorPoint;
  int iterations = 0;
  /// ADMM: primal/dual residual norms. Interior point: relative dual
  /// infeasibility and the certified duality gap of the (1/n)-scaled objective.
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double final_rho = 0.0;
  bool converged = false;
};

struct LadLassoResult {
  Vector beta;
  double objective = 0.0;
  SolverDiagnostics diagnostics;
};

/// sign(v) * max(|v| - kappa, 0).
inline double soft_threshold(double v, double kappa) noexcept {
  if (v > kappa) return v - kappa;
  if (v < -kappa) return v + kappa;
  return 0.0;
}

Vector soft_threshold(const Vector& v, double kappa);

/// Euclidean projection onto {b : ||b||_1 <= radius}. Returns the input
/// unchanged when it already lies inside the ball.
Vector l1_ball_projection(const Vector& beta, double radius);

/// Minimize (1/n) sum_i |y_i - x_i beta| + lambda ||beta||_1 over ||beta||_1 <= opts.l1_radius.
///
/// The default interior-point method returns a point whose objective is
/// within the certified duality gap of the optimum; when that point leaves
/// the l1 ball the call falls through to ADMM warm-started at its projection.
///
/// SolverMethod::kAdmm runs scaled-form ADMM with the splitting r = X beta (prox: soft-threshold
/// toward y with threshold 1/(n rho)) and z = beta (prox: soft-threshold
/// with lambda/rho, followed by the l1-ball projection). Both constraints
/// share one rho, so the matrix I + X'X is factored once per call and stays
/// valid when rho is rebalanced. For p > n the n x n form I + XX' is
/// factored instead (Woodbury).
///
/// On hitting max_iter the best iterate seen is returned with
/// diagnostics.converged == false. Throws Error(kNonFinite) on NaN/Inf input.
LadLassoResult lad_lasso(const Matrix& X, const Vector& y, double lambda, const SolverOptions& opts,
                         const std::optional<Vector>& initial_beta = std::nullopt);

}  // namespace cenlad
