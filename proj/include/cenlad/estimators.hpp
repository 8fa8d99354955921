#pragma once

#include <string_view>
#include <vector>

#include "cenlad/core_model.hpp"
#include "cenlad/solver.hpp"

namespace cenlad {

/// Starting point of one restart of the censored fit.
enum class RestartTag { kZero, kNlSolution, kRlSolution };

std::string_view to_string(RestartTag tag) noexcept;

struct FitConfig {
  double lambda = 0.0;
  SolverOptions solver;
  std::vector<RestartTag> restarts{RestartTag::kZero, RestartTag::kNlSolution, RestartTag::kRlSolution};
  int max_outer_iter = 100;
  /// Stop a restart once the censored objective decreases by less than this.
  double outer_tol = 1e-8;
  /// Every active set is tried as a start when n <= this (2^n convex solves).
  int exhaustive_max_n = 12;

  void validate() const;
};

/// Trace of one restart of fit_cl.
struct RestartLog {
  RestartTag tag = RestartTag::kZero;
  /// Full censored objective at the start point and after every accepted step.
  std::vector<double> objectives;
  bool degenerate = false;  // every row censored at some iterate
  bool skipped = false;     // start point unavailable (RL without uncensored rows)
  bool converged = false;
};

struct CensoredFit {
  FitResult result;
  std::vector<RestartLog> restarts;
};

/// Censored l1-penalised LAD: approximately minimizes
/// (1/n) sum |y_i - max(c_i, x_i beta)| + lambda ||beta||_1 over ||beta||_1 <= R.
///
/// Alternating active-set scheme: at beta_k keep the rows with x_i beta_k > c_i,
/// solve the convex LAD-LASSO on them (censored rows only add the constant
/// |y_i - c_i| / n), project onto the l1 ball and accept the step only if the
/// full objective does not increase. Each restart stops when the active rows
/// repeat or the decrease drops below outer_tol; the lowest objective over the
/// restarts wins, ties going to the earlier restart. For n <= exhaustive_max_n
/// the scheme is also started from the solution on each of the 2^n - 1
/// nonempty row subsets, which escapes the local minima the restarts miss on
/// tiny problems. The result
/// is a local solution of a nonconvex problem.
CensoredFit fit_cl_detailed(const Dataset& data, const FitConfig& cfg);

FitResult fit_cl(const Dataset& data, const FitConfig& cfg);

/// LAD-LASSO on all rows, treating censored responses as exact.
FitResult fit_nl(const Dataset& data, const FitConfig& cfg);

/// LAD-LASSO on the uncensored rows only, normalized by their count.
/// Throws Error(kNoUncensoredRows) when every row is censored.
FitResult fit_rl(const Dataset& data, const FitConfig& cfg);

/// Powell's unpenalised censored LAD: fit_cl with lambda = 0.
FitResult fit_powell(const Dataset& data, const SolverOptions& solver);

}  // namespace cenlad
