#include "cenlad/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cenlad {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kEmptyData: return "empty data";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kUndefinedSnr: return "undefined SNR";
    case ErrorCode::kNoUncensoredRows: return "no uncensored observations";
    case ErrorCode::kNotSymmetric: return "matrix not symmetric";
    case ErrorCode::kIo: return "I/O error";
    case ErrorCode::kParse: return "parse error";
  }
  return "unknown error";
}

namespace {

void require_same_length(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + " (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Dataset::Dataset(Matrix X, Vector y, Vector c) : X_(std::move(X)), y_(std::move(y)), c_(std::move(c)) {
  require_same_length(X_.rows(), y_.size(), "rows of X vs length of y");
  require_same_length(y_.size(), c_.size(), "length of y vs length of c");
  if (!X_.allFinite() || !y_.allFinite() || !c_.allFinite()) {
    throw Error(ErrorCode::kNonFinite, "dataset contains NaN or Inf");
  }
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    if (y_[i] < c_[i] - kCensorTol) {
      throw Error(ErrorCode::kInvalidArgument,
                  "row " + std::to_string(i) + ": y below its censoring level");
    }
  }
}

IndexList Dataset::uncensored_rows() const {
  IndexList rows;
  for (Eigen::Index i = 0; i < n(); ++i) {
    if (y_[i] - c_[i] > kCensorTol) rows.push_back(i);
  }
  return rows;
}

Dataset Dataset::subset(const IndexList& rows) const {
  Matrix X(static_cast<Eigen::Index>(rows.size()), p());
  Vector y(X.rows());
  Vector c(X.rows());
  for (Eigen::Index k = 0; k < X.rows(); ++k) {
    const auto i = rows[static_cast<std::size_t>(k)];
    X.row(k) = X_.row(i);
    y[k] = y_[i];
    c[k] = c_[i];
  }
  return Dataset(std::move(X), std::move(y), std::move(c));
}

IndexList support(const Vector& beta) {
  IndexList s;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) s.push_back(j);
  }
  return s;
}

double censored_prediction(const Vector& beta, const Vector& x_row, double c) {
  require_same_length(beta.size(), x_row.size(), "beta vs x_row");
  return std::max(x_row.dot(beta), c);
}

double censored_objective(const Vector& beta, const Dataset& data, double lambda) {
  if (data.n() == 0) throw Error(ErrorCode::kEmptyData, "censored_objective on empty dataset");
  require_same_length(beta.size(), data.p(), "beta vs columns of X");
  if (!(lambda >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be >= 0");
  const Vector fitted = (data.X() * beta).cwiseMax(data.c());
  const double loss = (data.y() - fitted).cwiseAbs().sum() / static_cast<double>(data.n());
  return loss + lambda * beta.lpNorm<1>();
}

double lad_objective(const Matrix& X, const Vector& y, const Vector& beta, double lambda) {
  if (X.rows() == 0) throw Error(ErrorCode::kEmptyData, "lad_objective on empty data");
  require_same_length(X.rows(), y.size(), "rows of X vs length of y");
  require_same_length(beta.size(), X.cols(), "beta vs columns of X");
  const double loss = (y - X * beta).cwiseAbs().sum() / static_cast<double>(X.rows());
  return loss + lambda * beta.lpNorm<1>();
}

double prediction_error(const Matrix& X, const Vector& beta_hat, const Vector& beta0) {
  require_same_length(beta_hat.size(), beta0.size(), "beta_hat vs beta0");
  require_same_length(X.cols(), beta0.size(), "columns of X vs beta0");
  if (X.rows() == 0) throw Error(ErrorCode::kEmptyData, "prediction_error on empty design");
  return (X * (beta_hat - beta0)).squaredNorm() / static_cast<double>(X.rows());
}

double estimation_error(const Vector& beta_hat, const Vector& beta0) {
  require_same_length(beta_hat.size(), beta0.size(), "beta_hat vs beta0");
  return (beta_hat - beta0).lpNorm<1>();
}

double censored_fraction(const Dataset& data) {
  if (data.n() == 0) throw Error(ErrorCode::kEmptyData, "censored_fraction on empty dataset");
  const auto censored = data.n() - static_cast<Eigen::Index>(data.uncensored_rows().size());
  return static_cast<double>(censored) / static_cast<double>(data.n());
}

IndexList active_observations(const Dataset& data, const Vector& beta) {
  require_same_length(beta.size(), data.p(), "beta vs columns of X");
  const Vector xb = data.X() * beta;
  IndexList rows;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (xb[i] > data.c()[i]) rows.push_back(i);
  }
  return rows;
}

}  // namespace cenlad
