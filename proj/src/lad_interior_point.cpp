// Primal-dual interior point method for l1-penalised LAD regression.
//
// (1/n) sum |y_i - x_i b| + lambda ||b||_1 is plain LAD regression on the
// stacked rows A = [X; n lambda I], b = [y; 0]. Its dual is the bounded LP
//
//   max  b'a   s.t.  A'a = A'1 / 2,   0 <= a <= 1,
//
// solved with Mehrotra's predictor-corrector in the Frisch-Newton layout
// (Portnoy & Koenker 1997). The normal matrix is A'D^{-1}A = X'D1 X + k^2 D2.

#include "lad_interior_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cenlad::detail {

namespace {

constexpr double kStepShrink = 0.99995;

double max_step(const Vector& v, const Vector& dv) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
  }
  return alpha;
}

/// Solves (X' diag(d1) X + diag(e)) x = rhs. The n x n Woodbury form is
/// cheaper for p > n but loses all accuracy once the interior-point scaling
/// spans many orders of magnitude, so the p x p matrix is always used.
class NormalSystem {
 public:
  NormalSystem(const Matrix& X, const Vector& d1, const Vector& e) {
    Matrix N = X.transpose() * d1.asDiagonal() * X;
    N.diagonal() += e;
    // Unpenalised wide problems are singular; a relative ridge keeps the
    // factorization defined without moving the LP solution.
    N.diagonal().array() += 1e-13 * std::max(1.0, N.diagonal().maxCoeff());
    ldlt_.compute(N);
  }

  [[nodiscard]] Vector solve(const Vector& rhs) const { return ldlt_.solve(rhs); }

 private:
  Eigen::LDLT<Matrix> ldlt_;
};

}  // namespace

InteriorPointResult lad_lasso_interior_point(const Matrix& X, const Vector& y, double lambda,
                                             const InteriorPointOptions& opts) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  const double kappa = static_cast<double>(n) * lambda;
  const bool penalised = kappa > 0.0;
  const Eigen::Index m = n + (penalised ? p : 0);

  // Stacked quantities are kept split: top block (n rows of X), bottom block
  // (p rows of kappa * I).
  auto apply_A = [&](const Vector& v) -> Vector {
    Vector out(m);
    out.head(n) = X * v;
    if (penalised) out.tail(p) = kappa * v;
    return out;
  };
  auto apply_At = [&](const Vector& v) -> Vector {
    Vector out = X.transpose() * v.head(n);
    if (penalised) out += kappa * v.tail(p);
    return out;
  };

  Vector b = Vector::Zero(m);
  b.head(n) = y;
  const Vector c = apply_At(Vector::Constant(m, 0.5));

  Vector beta = Vector::Zero(p);
  Vector a = Vector::Constant(m, 0.5);
  Vector s = Vector::Constant(m, 0.5);
  const Vector r0 = b;
  const double delta = std::max(1e-8, 0.1 * r0.cwiseAbs().mean());
  Vector w = r0.cwiseMax(0.0).array() + delta;
  Vector z = (-r0).cwiseMax(0.0).array() + delta;

  InteriorPointResult result;
  result.beta = beta;
  double best_primal = std::numeric_limits<double>::infinity();
  double best_dual = -std::numeric_limits<double>::infinity();
  const double gap_target = opts.gap_tol * static_cast<double>(n);
  const double c_scale = 1.0 + c.norm();
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    result.iterations = iter;
    const Vector Abeta = apply_A(beta);
    const Vector rd = b + z - w - Abeta;
    const Vector rp = c - apply_At(a);

    const double primal_obj = (b - Abeta).cwiseAbs().sum();
    if (primal_obj < best_primal) {
      best_primal = primal_obj;
      result.beta = beta;
    }
    const double dual_obj = 2.0 * (b.dot(a) - 0.5 * b.sum());
    const double infeasibility = rp.norm() / c_scale;
    if (infeasibility <= opts.feasibility_tol && dual_obj > best_dual) {
      best_dual = dual_obj;
      result.primal_infeasibility = infeasibility;
    }
    result.gap = (best_primal - best_dual) / static_cast<double>(n);
    if (best_primal - best_dual <= gap_target) {
      result.converged = true;
      break;
    }

    const double mu = (a.dot(z) + s.dot(w)) / static_cast<double>(2 * m);
    // Past this point the Newton systems are too ill-conditioned to help.
    if (mu < 1e-15 * std::max(1.0, std::abs(primal_obj)) / static_cast<double>(m)) {
      result.converged = result.gap <= opts.stall_gap_tol;
      break;
    }
    const Vector d_inv = (z.cwiseQuotient(a) + w.cwiseQuotient(s)).cwiseInverse();

    Vector e = Vector::Zero(p);
    if (penalised) e = kappa * kappa * d_inv.tail(p);
    const NormalSystem normal(X, d_inv.head(n), e);

    auto direction = [&](const Vector& rhs_hat, Vector& d_beta, Vector& d_a) {
      d_beta = normal.solve(apply_At(d_inv.cwiseProduct(rhs_hat)) - rp);
      d_a = d_inv.cwiseProduct(rhs_hat - apply_A(d_beta));
    };

    // Affine-scaling predictor.
    Vector d_beta, d_a;
    direction(rd - z + w, d_beta, d_a);
    Vector d_s = -d_a;
    Vector d_z = -z - z.cwiseProduct(d_a).cwiseQuotient(a);
    Vector d_w = -w - w.cwiseProduct(d_s).cwiseQuotient(s);

    double alpha_p = std::min(max_step(a, d_a), max_step(s, d_s));
    double alpha_d = std::min(max_step(z, d_z), max_step(w, d_w));
    const double mu_aff = ((a + alpha_p * d_a).dot(z + alpha_d * d_z) +
                           (s + alpha_p * d_s).dot(w + alpha_d * d_w)) /
                          static_cast<double>(2 * m);
    const double sigma = std::pow(mu_aff / mu, 3.0);
    const double mu_c = sigma * mu;

    // Centering-corrector with the second-order terms of the predictor.
    const Vector cross_az = d_a.cwiseProduct(d_z);
    const Vector cross_sw = d_s.cwiseProduct(d_w);
    const Vector rhs = rd + ((mu_c - a.array() * z.array() - cross_az.array()) / a.array()).matrix() -
                       ((mu_c - s.array() * w.array() - cross_sw.array()) / s.array()).matrix();
    direction(rhs, d_beta, d_a);
    d_s = -d_a;
    d_z = ((mu_c - a.array() * z.array() - z.array() * d_a.array() - cross_az.array()) / a.array()).matrix();
    d_w = ((mu_c - s.array() * w.array() - w.array() * d_s.array() - cross_sw.array()) / s.array()).matrix();

    alpha_p = std::min(1.0, kStepShrink * std::min(max_step(a, d_a), max_step(s, d_s)));
    alpha_d = std::min(1.0, kStepShrink * std::min(max_step(z, d_z), max_step(w, d_w)));

    a += alpha_p * d_a;
    s += alpha_p * d_s;
    beta += alpha_d * d_beta;
    z += alpha_d * d_z;
    w += alpha_d * d_w;

    if (!beta.allFinite() || !a.allFinite()) break;
  }
  return result;
}

}  // namespace cenlad::detail
