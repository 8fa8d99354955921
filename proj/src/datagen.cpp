#include "cenlad/datagen.hpp"

#include <array>
#include <cmath>
#include <string>

#include "cenlad/rng.hpp"

namespace cenlad {

namespace {

// Independent sub-streams per drawn component so that changing, say, the
// censoring law leaves X and beta0 untouched for the same seed.
enum Stream : std::uint64_t { kStreamX = 1, kStreamSigns = 2, kStreamNoise = 3, kStreamCensor = 4 };

CounterRng stream(std::uint64_t seed, Stream which) { return CounterRng(mix64(seed ^ mix64(which))); }

Matrix standard_normal_matrix(Eigen::Index rows, Eigen::Index cols, CounterRng& rng) {
  Matrix X(rows, cols);
  // Row-major fill order so row i depends only on the first (i+1)*cols draws.
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) X(i, j) = rng.normal();
  }
  return X;
}

Vector censoring_levels(const DesignConfig& cfg, Eigen::Index m, CounterRng& rng) {
  Vector c(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    c[i] = cfg.censor_mode == CensorMode::kGaussian ? rng.normal(cfg.censor_mean, cfg.censor_sd)
                                                    : cfg.censor_constant;
  }
  return c;
}

double positive_part_energy(const Vector& signal) { return signal.cwiseMax(0.0).squaredNorm(); }

}  // namespace

void DesignConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (n < 1) fail("n must be >= 1");
  if (p < 1) fail("p must be >= 1");
  if (s < 1 || s > p) fail("s must satisfy 1 <= s <= p");
  if (!(snr > 0.0) || !std::isfinite(snr)) fail("snr must be positive and finite");
  if (!(censor_sd >= 0.0)) fail("censor_sd must be >= 0");
  if (!std::isfinite(censor_mean) || !std::isfinite(censor_constant)) fail("censoring parameters must be finite");
}

DesignConfig DesignConfig::constant_censoring(int n, int p, int s, double snr, double level) {
  DesignConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.s = s;
  cfg.snr = snr;
  cfg.censor_mode = CensorMode::kConstant;
  cfg.censor_constant = level;
  return cfg;
}

Vector PopulationSample::responses(const Vector& beta0) const {
  return (X * beta0 + eps).cwiseMax(c);
}

double realized_snr(const Vector& signal, const Vector& noise) {
  if (signal.size() != noise.size()) throw Error(ErrorCode::kDimensionMismatch, "signal vs noise length");
  return std::sqrt(positive_part_energy(signal) / noise.squaredNorm());
}

Vector scale_noise_to_snr(const Vector& signal, const Vector& noise, double snr) {
  if (signal.size() != noise.size()) throw Error(ErrorCode::kDimensionMismatch, "signal vs noise length");
  if (!(snr > 0.0)) throw Error(ErrorCode::kInvalidArgument, "snr must be positive");
  const double numerator = positive_part_energy(signal);
  if (!(numerator > 0.0)) {
    throw Error(ErrorCode::kUndefinedSnr, "signal has no positive part");
  }
  const double noise_energy = noise.squaredNorm();
  if (!(noise_energy > 0.0)) throw Error(ErrorCode::kUndefinedSnr, "noise vector is identically zero");
  const double k = std::sqrt(numerator / noise_energy) / snr;
  return k * noise;
}

std::pair<Dataset, GroundTruth> generate_design(const DesignConfig& cfg) {
  cfg.validate();
  auto rng_x = stream(cfg.seed, kStreamX);
  auto rng_signs = stream(cfg.seed, kStreamSigns);
  auto rng_noise = stream(cfg.seed, kStreamNoise);
  auto rng_censor = stream(cfg.seed, kStreamCensor);

  Matrix X = standard_normal_matrix(cfg.n, cfg.p, rng_x);

  GroundTruth truth;
  truth.beta0 = Vector::Zero(cfg.p);
  for (int j = 0; j < cfg.s; ++j) {
    truth.beta0[j] = rng_signs.sign();
    truth.active_set.push_back(j);
  }

  const Vector signal = X * truth.beta0;
  Vector unit_noise(cfg.n);
  for (int i = 0; i < cfg.n; ++i) unit_noise[i] = rng_noise.normal();
  const Vector noise = scale_noise_to_snr(signal, unit_noise, cfg.snr);
  truth.sigma = noise.norm() / unit_noise.norm();

  Vector c = censoring_levels(cfg, cfg.n, rng_censor);
  // cwiseMax stores y == c bit-exactly where censoring binds.
  Vector y = (signal + noise).cwiseMax(c);
  truth.realized_noise = noise;
  return {Dataset(std::move(X), std::move(y), std::move(c)), std::move(truth)};
}

PopulationSample sample_population(const DesignConfig& cfg, const GroundTruth& truth,
                                   Eigen::Index m, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "population sample size must be >= 1");
  if (truth.beta0.size() != cfg.p) throw Error(ErrorCode::kDimensionMismatch, "beta0 vs design p");
  auto rng_x = stream(seed, kStreamX);
  auto rng_noise = stream(seed, kStreamNoise);
  auto rng_censor = stream(seed, kStreamCensor);
  PopulationSample pop;
  pop.X = standard_normal_matrix(m, cfg.p, rng_x);
  pop.eps.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) pop.eps[i] = rng_noise.normal(0.0, truth.sigma);
  pop.c = censoring_levels(cfg, m, rng_censor);
  return pop;
}

MonteCarloEstimate excess_risk_mc(const Vector& beta, const GroundTruth& truth, const DesignConfig& design,
                                  Eigen::Index n_mc, std::uint64_t seed) {
  if (n_mc < 1) throw Error(ErrorCode::kInvalidArgument, "n_mc must be >= 1");
  if (beta.size() != truth.beta0.size()) throw Error(ErrorCode::kDimensionMismatch, "beta vs beta0 length");
  const PopulationSample pop = sample_population(design, truth, n_mc, seed);
  const Vector y = pop.responses(truth.beta0);
  const Vector gap = (y - (pop.X * beta).cwiseMax(pop.c)).cwiseAbs() -
                     (y - (pop.X * truth.beta0).cwiseMax(pop.c)).cwiseAbs();
  MonteCarloEstimate est;
  est.mean = gap.mean();
  if (n_mc > 1) {
    const double var = (gap.array() - est.mean).square().sum() / static_cast<double>(n_mc - 1);
    est.std_error = std::sqrt(var / static_cast<double>(n_mc));
  }
  return est;
}

std::vector<DesignConfig> table1_designs() {
  struct Setting {
    int n, p, s;
    double snr;
  };
  static constexpr std::array<Setting, 24> kSettings{{
      {70, 250, 10, 8}, {70, 100, 10, 8}, {70, 250, 10, 2}, {70, 100, 10, 2},
      {70, 250, 5, 8},  {70, 100, 5, 8},  {70, 250, 5, 2},  {70, 100, 5, 2},
      {40, 100, 5, 8},  {40, 100, 5, 2},  {40, 100, 3, 8},  {40, 100, 3, 2},
      {40, 50, 5, 8},   {40, 50, 5, 2},   {40, 50, 3, 8},   {40, 50, 3, 2},
      {40, 50, 5, 8},   {40, 50, 5, 2},   {40, 50, 3, 8},   {40, 50, 3, 2},
      {20, 30, 5, 8},   {20, 30, 5, 2},   {20, 30, 3, 8},   {20, 30, 3, 2},
  }};
  std::vector<DesignConfig> designs;
  designs.reserve(kSettings.size());
  for (const auto& st : kSettings) {
    DesignConfig cfg;
    cfg.n = st.n;
    cfg.p = st.p;
    cfg.s = st.s;
    cfg.snr = st.snr;
    designs.push_back(cfg);
  }
  return designs;
}

}  // namespace cenlad
