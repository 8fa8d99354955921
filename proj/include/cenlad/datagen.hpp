#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cenlad/core_model.hpp"

namespace cenlad {

enum class CensorMode { kGaussian, kConstant };

/// One simulation design: sizes, signal-to-noise ratio and the censoring law.
struct DesignConfig {
  int n = 70;
  int p = 100;
  int s = 5;
  double snr = 8.0;
  CensorMode censor_mode = CensorMode::kGaussian;
  double censor_mean = 0.0;
  double censor_sd = 2.0;
  double censor_constant = 0.0;  // used when censor_mode == kConstant
  std::uint64_t seed = 1;

  /// Throws Error(kInvalidArgument) unless 1 <= s <= p, n >= 1, snr > 0, censor_sd >= 0.
  void validate() const;

  static DesignConfig constant_censoring(int n, int p, int s, double snr, double level);
};

/// Fresh draws of (x, c, eps) from a design's distributions, independent of
/// any observed dataset. Used for population (P) expectations.
struct PopulationSample {
  Matrix X;
  Vector c;
  Vector eps;

  /// Latent-then-censored responses max(x beta0 + eps, c).
  [[nodiscard]] Vector responses(const Vector& beta0) const;
};

/// Simulate one dataset and its ground truth.
///
/// X has i.i.d. N(0,1) entries, the first s coefficients of beta0 are
/// independent fair +-1 signs and the rest are zero. Unit Gaussian noise is
/// drawn and rescaled so the realized SNR equals cfg.snr exactly. The
/// responses are y = max(X beta0 + eps, c).
std::pair<Dataset, GroundTruth> generate_design(const DesignConfig& cfg);

/// Rescale `noise` so that sqrt(sum (signal_i v 0)^2 / sum noise_i^2) == snr.
Vector scale_noise_to_snr(const Vector& signal, const Vector& noise, double snr);

/// SNR of a realized sample with the positive-part numerator.
double realized_snr(const Vector& signal, const Vector& noise);

/// m fresh (x, c, eps) triples; eps ~ N(0, truth.sigma^2).
PopulationSample sample_population(const DesignConfig& cfg, const GroundTruth& truth,
                                   Eigen::Index m, std::uint64_t seed);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Population excess risk E|y - f_beta(x,c)| - E|y - f_beta0(x,c)| estimated
/// from n_mc fresh draws, f_b(x,c) = max(x b, c). The estimand is >= 0; the
/// estimate may dip below by sampling noise. Exactly 0 at beta == beta0.
MonteCarloEstimate excess_risk_mc(const Vector& beta, const GroundTruth& truth, const DesignConfig& design,
                                  Eigen::Index n_mc, std::uint64_t seed);

/// The 24 settings (n, p, s, SNR) of the reference simulation study, in order.
std::vector<DesignConfig> table1_designs();

}  // namespace cenlad
