#pragma once

// Brute-force references for the solvers: exhaustive grid search and plain
// loops, independent of Eigen expression code paths.

#include <cmath>
#include <functional>
#include <limits>

#include "cenlad/core_model.hpp"
#include "cenlad/rng.hpp"

namespace cenlad::testing {

/// Minimum of f over the grid {lo, lo + step, ..., hi}^p (p <= 3).
inline double grid_minimum(Eigen::Index p, double lo, double hi, double step,
                           const std::function<double(const Vector&)>& f, Vector* argmin = nullptr) {
  const int points = static_cast<int>(std::lround((hi - lo) / step)) + 1;
  double best = std::numeric_limits<double>::infinity();
  Vector b(p);
  long total = 1;
  for (Eigen::Index j = 0; j < p; ++j) total *= points;
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    for (Eigen::Index j = 0; j < p; ++j) {
      b[j] = lo + step * static_cast<double>(rest % points);
      rest /= points;
    }
    const double v = f(b);
    if (v < best) {
      best = v;
      if (argmin) *argmin = b;
    }
  }
  return best;
}

inline double loop_lad_objective(const Matrix& X, const Vector& y, const Vector& b, double lambda) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double xb = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) xb += X(i, j) * b[j];
    loss += std::abs(y[i] - xb);
  }
  double l1 = 0.0;
  for (Eigen::Index j = 0; j < b.size(); ++j) l1 += std::abs(b[j]);
  return loss / static_cast<double>(X.rows()) + lambda * l1;
}

inline double loop_censored_objective(const Matrix& X, const Vector& y, const Vector& c, const Vector& b,
                                      double lambda) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double xb = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) xb += X(i, j) * b[j];
    loss += std::abs(y[i] - std::max(xb, c[i]));
  }
  double l1 = 0.0;
  for (Eigen::Index j = 0; j < b.size(); ++j) l1 += std::abs(b[j]);
  return loss / static_cast<double>(X.rows()) + lambda * l1;
}

/// Small censored instance whose minimizers sit well inside [-3, 3]^p.
struct TinyInstance {
  Matrix X;
  Vector y;
  Vector c;
  double lambda = 0.0;
};

inline TinyInstance tiny_instance(std::uint64_t seed, int max_n = 10, int max_p = 3) {
  CounterRng rng(seed);
  TinyInstance inst;
  const int p = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_p));
  const int n = std::max(p + 2, 4 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_n - 3)));
  inst.X.resize(n, p);
  Vector beta(p);
  for (int j = 0; j < p; ++j) beta[j] = 3.0 * rng.uniform() - 1.5;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) inst.X(i, j) = rng.normal();
  inst.c.resize(n);
  inst.y.resize(n);
  for (int i = 0; i < n; ++i) {
    inst.c[i] = rng.normal(0.0, 0.5);
    inst.y[i] = std::max(inst.X.row(i).dot(beta) + 0.3 * rng.normal(), inst.c[i]);
  }
  inst.lambda = 0.1 * rng.uniform();
  return inst;
}

}  // namespace cenlad::testing
