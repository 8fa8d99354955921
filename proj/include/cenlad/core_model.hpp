#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cenlad/error.hpp"

namespace cenlad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexList = std::vector<Eigen::Index>;

/// Observed left-censored sample: y_i = max(x_i' beta0 + eps_i, c_i).
///
/// Construction validates shapes and y >= c; the members are const so a
/// Dataset can be shared freely between worker threads.
class Dataset {
 public:
  Dataset(Matrix X, Vector y, Vector c);

  [[nodiscard]] const Matrix& X() const noexcept { return X_; }
  [[nodiscard]] const Vector& y() const noexcept { return y_; }
  [[nodiscard]] const Vector& c() const noexcept { return c_; }
  [[nodiscard]] Eigen::Index n() const noexcept { return X_.rows(); }
  [[nodiscard]] Eigen::Index p() const noexcept { return X_.cols(); }

  /// Rows with y_i > c_i (beyond the censoring tolerance).
  [[nodiscard]] IndexList uncensored_rows() const;

  /// Sub-sample restricted to the given rows, in the given order.
  [[nodiscard]] Dataset subset(const IndexList& rows) const;

 private:
  Matrix X_;
  Vector y_;
  Vector c_;
};

enum class ErrorModel { kGaussian };

struct GroundTruth {
  Vector beta0;
  double sigma = 1.0;
  IndexList active_set;
  ErrorModel error_model = ErrorModel::kGaussian;
  /// Noise vector of the simulated sample, when known.
  Vector realized_noise;

  [[nodiscard]] Eigen::Index sparsity() const noexcept {
    return static_cast<Eigen::Index>(active_set.size());
  }
};

/// Indices j with beta[j] != 0.
IndexList support(const Vector& beta);

struct FitResult {
  Vector beta_hat;
  double objective = 0.0;
  int iterations = 0;
  int restarts_used = 0;
  bool converged = false;
  IndexList active_obs;
};

/// Absolute tolerance on y - c used to call a row censored.
inline constexpr double kCensorTol = 1e-12;

/// max(<x_row, beta>, c).
double censored_prediction(const Vector& beta, const Vector& x_row, double c);

/// (1/n) sum_i |y_i - max(c_i, x_i beta)| + lambda ||beta||_1.
double censored_objective(const Vector& beta, const Dataset& data, double lambda);

/// (1/n) sum_i |y_i - x_i beta| + lambda ||beta||_1 (no censoring).
double lad_objective(const Matrix& X, const Vector& y, const Vector& beta, double lambda);

/// (1/n) sum_i (x_i beta_hat - x_i beta0)^2.
double prediction_error(const Matrix& X, const Vector& beta_hat, const Vector& beta0);

/// ||beta_hat - beta0||_1.
double estimation_error(const Vector& beta_hat, const Vector& beta0);

/// Fraction of rows with |y_i - c_i| <= kCensorTol.
double censored_fraction(const Dataset& data);

/// Rows where the censoring does not bind at beta: x_i beta > c_i.
IndexList active_observations(const Dataset& data, const Vector& beta);

}  // namespace cenlad
