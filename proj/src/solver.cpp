#include "cenlad/solver.hpp"

#include "lad_interior_point.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace cenlad {

void SolverOptions::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (!(penalty_rho > 0.0)) fail("penalty_rho must be > 0");
  if (!(tol_primal > 0.0) || !(tol_dual > 0.0)) fail("solver tolerances must be > 0");
  if (max_iter < 1) fail("max_iter must be >= 1");
  if (!(l1_radius > 0.0)) fail("l1_radius must be > 0");
}

Vector soft_threshold(const Vector& v, double kappa) {
  return v.unaryExpr([kappa](double x) { return soft_threshold(x, kappa); });
}

Vector l1_ball_projection(const Vector& beta, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "l1 radius must be > 0");
  if (!std::isfinite(radius) || beta.lpNorm<1>() <= radius) return beta;

  // Duchi et al. (2008): threshold theta from the sorted magnitudes.
  std::vector<double> mags(beta.size());
  for (Eigen::Index j = 0; j < beta.size(); ++j) mags[j] = std::abs(beta[j]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cumulative += mags[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (mags[k] > candidate) theta = candidate;
  }
  Vector out = soft_threshold(beta, theta);
  // Guard against round-off pushing the norm a hair above the radius.
  const double norm = out.lpNorm<1>();
  if (norm > radius) out *= radius / norm;
  return out;
}

namespace {

/// Applies (I + X'X)^{-1}, factoring whichever of the p x p or n x n Gram
/// forms is smaller.
class RegularizedGramSolver {
 public:
  explicit RegularizedGramSolver(const Matrix& X) : X_(X), wide_(X.cols() > X.rows()) {
    if (wide_) {
      Matrix K = X * X.transpose();
      K.diagonal().array() += 1.0;
      llt_.compute(K);
    } else {
      Matrix M = X.transpose() * X;
      M.diagonal().array() += 1.0;
      llt_.compute(M);
    }
  }

  [[nodiscard]] Vector solve(const Vector& rhs) const {
    if (!wide_) return llt_.solve(rhs);
    const Vector Xr = X_ * rhs;
    return rhs - X_.transpose() * llt_.solve(Xr);
  }

 private:
  const Matrix& X_;
  bool wide_;
  Eigen::LLT<Matrix> llt_;
};

void check_finite(const Matrix& X, const Vector& y, double lambda) {
  if (!X.allFinite() || !y.allFinite() || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kNonFinite, "lad_lasso input contains NaN or Inf");
  }
}

constexpr double kOverRelaxation = 1.6;
constexpr int kBalanceEvery = 10;
constexpr double kBalanceRatio = 10.0;

LadLassoResult lad_lasso_admm(const Matrix& X, const Vector& y, double lambda, const SolverOptions& opts,
                              const std::optional<Vector>& initial_beta) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  const RegularizedGramSolver gram(X);
  const double inv_n = 1.0 / static_cast<double>(n);
  const double radius = opts.l1_radius;

  Vector z = initial_beta ? l1_ball_projection(*initial_beta, radius) : Vector::Zero(p);
  Vector r = X * z;
  Vector u = Vector::Zero(n);
  Vector w = Vector::Zero(p);
  Vector beta = z;
  double rho = opts.penalty_rho;

  LadLassoResult best;
  best.beta = z;
  best.objective = lad_objective(X, y, z, lambda);

  const double abs_scale_primal = std::sqrt(static_cast<double>(n + p));
  const double abs_scale_dual = std::sqrt(static_cast<double>(p));

  SolverDiagnostics diag;
  diag.method = SolverMethod::kAdmm;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    beta = gram.solve(X.transpose() * (r - u) + (z - w));
    const Vector Xbeta = X * beta;

    const Vector r_old = r;
    const Vector z_old = z;
    const Vector r_relaxed = kOverRelaxation * Xbeta + (1.0 - kOverRelaxation) * r_old;
    const Vector z_relaxed = kOverRelaxation * beta + (1.0 - kOverRelaxation) * z_old;

    r = y + soft_threshold(r_relaxed + u - y, inv_n / rho);
    z = soft_threshold(z_relaxed + w, lambda / rho);
    if (std::isfinite(radius)) z = l1_ball_projection(z, radius);

    u += r_relaxed - r;
    w += z_relaxed - z;

    const double primal = std::sqrt((Xbeta - r).squaredNorm() + (beta - z).squaredNorm());
    const double dual = rho * (X.transpose() * (r - r_old) + (z - z_old)).norm();
    const double primal_scale = std::max(std::sqrt(Xbeta.squaredNorm() + beta.squaredNorm()),
                                         std::sqrt(r.squaredNorm() + z.squaredNorm()));
    const double dual_scale = rho * (X.transpose() * u + w).norm();
    const double eps_primal = opts.tol_primal * (abs_scale_primal + primal_scale);
    const double eps_dual = opts.tol_dual * (abs_scale_dual + dual_scale);

    diag.iterations = iter;
    diag.primal_residual = primal;
    diag.dual_residual = dual;
    const bool done = primal <= eps_primal && dual <= eps_dual;

    if (done || iter % kBalanceEvery == 0 || iter == opts.max_iter) {
      const double obj = lad_objective(X, y, z, lambda);
      if (obj < best.objective) {
        best.objective = obj;
        best.beta = z;
      }
    }
    if (done) {
      diag.converged = true;
      break;
    }

    if (opts.residual_balancing && iter % kBalanceEvery == 0) {
      if (primal > kBalanceRatio * dual) {
        rho *= 2.0;
        u /= 2.0;
        w /= 2.0;
      } else if (dual > kBalanceRatio * primal) {
        rho /= 2.0;
        u *= 2.0;
        w *= 2.0;
      }
    }
  }
  diag.final_rho = rho;

  // The converged z can sit a rounding error above an earlier iterate.
  const double at_z = lad_objective(X, y, z, lambda);
  if (at_z <= best.objective) {
    best.objective = at_z;
    best.beta = z;
  }
  best.diagnostics = diag;
  return best;
}

/// Interior points carry ~1e-12 dust where the LP vertex has exact zeros.
Vector drop_dust(const Matrix& X, const Vector& y, double lambda, const Vector& beta) {
  const double cutoff = 1e-7 * std::max(1.0, beta.cwiseAbs().maxCoeff());
  Vector cleaned = (beta.array().abs() <= cutoff).select(0.0, beta);
  const double before = lad_objective(X, y, beta, lambda);
  const double after = lad_objective(X, y, cleaned, lambda);
  return after <= before + 1e-9 ? cleaned : beta;
}

LadLassoResult lad_lasso_ipm(const Matrix& X, const Vector& y, double lambda, const SolverOptions& opts) {
  const auto ipm = detail::lad_lasso_interior_point(X, y, lambda, detail::InteriorPointOptions{});
  LadLassoResult out;
  out.beta = drop_dust(X, y, lambda, ipm.beta);
  out.objective = lad_objective(X, y, out.beta, lambda);
  out.diagnostics.method = SolverMethod::kInteriorPoint;
  out.diagnostics.iterations = ipm.iterations;
  out.diagnostics.primal_residual = ipm.primal_infeasibility;
  out.diagnostics.dual_residual = ipm.gap;
  out.diagnostics.converged = ipm.converged;
  if (!ipm.converged) {
    // Fall back to ADMM, keeping whichever point is better.
    auto admm = lad_lasso_admm(X, y, lambda, opts, l1_ball_projection(out.beta, opts.l1_radius));
    if (admm.objective < out.objective || !out.beta.allFinite()) return admm;
  }
  return out;
}

}  // namespace

LadLassoResult lad_lasso(const Matrix& X, const Vector& y, double lambda, const SolverOptions& opts,
                         const std::optional<Vector>& initial_beta) {
  opts.validate();
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (n < 1 || p < 1) throw Error(ErrorCode::kEmptyData, "lad_lasso needs n >= 1 and p >= 1");
  if (y.size() != n) throw Error(ErrorCode::kDimensionMismatch, "rows of X vs length of y");
  if (!(lambda >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be >= 0");
  check_finite(X, y, lambda);
  if (initial_beta && initial_beta->size() != p) {
    throw Error(ErrorCode::kDimensionMismatch, "initial beta vs columns of X");
  }

  if (opts.method == SolverMethod::kAdmm) return lad_lasso_admm(X, y, lambda, opts, initial_beta);

  auto result = lad_lasso_ipm(X, y, lambda, opts);
  if (result.beta.lpNorm<1>() > opts.l1_radius) {
    result = lad_lasso_admm(X, y, lambda, opts, l1_ball_projection(result.beta, opts.l1_radius));
  }
  return result;
}

}  // namespace cenlad
