#pragma once

#include <cstdint>
#include <vector>

#include "cenlad/core_model.hpp"
#include "cenlad/datagen.hpp"

namespace cenlad {

/// Constants entering the oracle inequality for the censored estimator.
struct TheoryParams {
  double K_X = 1.0;
  double K0 = 1.0;
  double C1_sq = 1.0;
  double C2 = 1.0;
  double C = 1.0;  // 1 / (C1 * C2)
  double phi0_sq = 1.0;
  double Lambda_sq = 1.0;
  double L = 1.0;
  double eps0 = 1.0;
  double alpha_eps = 1.0;

  /// Throws Error(kInvalidArgument) unless every field is > 0 and C matches C1_sq, C2.
  void validate() const;
};

/// 4 K_X sqrt(2 log(2p) / n) + K_X sqrt(8 t / n).
double lambda_t(double K_X, int p, int n, double t);

struct OracleBounds {
  double excess = 0.0;  // 9 lambda^2 s C / phi0^2
  double l1 = 0.0;      // 6 lambda s C / phi0^2
};

OracleBounds oracle_bounds(double lambda, int s, double C, double phi0_sq);

struct CompatibilityResult {
  double value = 0.0;
  /// False when the sign patterns were sampled rather than enumerated; the
  /// value is then only an upper bound.
  bool exact = true;
};

/// min s * b'Sigma b / ||b_S||_1^2 over the cone ||b_{S^c}||_1 <= 3 ||b_S||_1.
///
/// With ||b_S||_1 = 1 and the signs of b_S fixed the feasible set is a
/// product of a signed simplex and an l1 ball, so each sign pattern is a
/// convex QP, solved by projected accelerated gradient. Patterns b and -b
/// give the same value, leaving 2^(|S|-1) problems; for
/// |S| > kMaxExactSupport a random subset is searched instead.
/// Throws Error(kNotSymmetric) if Sigma is not symmetric within 1e-8.
CompatibilityResult compatibility_constant(const Matrix& Sigma, const IndexList& S);

inline constexpr int kMaxExactSupport = 10;

/// Margin constants for N(0, sigma^2) errors.
struct MarginConstants {
  double Lambda_sq = 0.0;  // density at 0
  double L = 0.0;          // max |density'|
  double eps0 = 0.0;       // Lambda^2 / (2 L / 3)
  double alpha_eps = 0.0;  // inf of h over eps0 <= |z| <= K0
  double C1_sq = 0.0;      // min(eps0, alpha / K0^2)
  /// eps0 >= K0: the infimum is over an empty range and C1_sq = eps0.
  bool eps0_exceeds_K0 = false;
};

/// h(z) = 2 int_0^z (z - e) dnu0(e) for nu0 = N(0, sigma^2), by adaptive quadrature.
double margin_h(double z, double sigma);

MarginConstants margin_constant(double error_sigma, double K0);

struct CensoringConstantEstimate {
  double C2_hat = 0.0;
  /// Delta-method standard error of the minimizing ratio.
  double std_error = 0.0;
  std::vector<double> ratios;
  int skipped = 0;
};

/// Monte Carlo check of E(f_b - f0)^2 >= C2 E(x'(b - b0))^2 over n_dirs random
/// cone directions b - b0 with ||(b - b0)_{S^c}||_1 <= 3 ||(b - b0)_S||_1.
/// The minimum ratio is returned; it upper-bounds the true constant.
CensoringConstantEstimate censoring_constant_check(const GroundTruth& truth, const DesignConfig& design,
                                                   int n_dirs, Eigen::Index n_mc, std::uint64_t seed);

struct ConcentrationResult {
  double exceedance_freq = 0.0;
  std::vector<double> z_lower;    // per replicate
  std::vector<double> threshold;  // M * lambda(t) with the replicate's empirical K_X
};

/// Monte Carlo check of P[Z_M >= M lambda(t)] <= exp(-t), where
/// Z_M = sup_{||b - b0||_1 <= M} |(P_n - P) gamma_b| and
/// gamma_b = |y - max(x b, c)| - |y - max(x b0, c)|.
///
/// Z_M is bounded from below by searching the vertices b0 +- M e_j, n_dirs
/// random points of the ball and a few pairwise midpoint refinements. P is
/// a shared population sample of pop_size draws.
ConcentrationResult concentration_mc(const GroundTruth& truth, const DesignConfig& design, double M, double t,
                                     int n_dirs, int n_reps, std::uint64_t seed,
                                     Eigen::Index pop_size = 100000);

}  // namespace cenlad
