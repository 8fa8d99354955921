#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cenlad/datagen.hpp"
#include "cenlad/estimators.hpp"

namespace cenlad {

enum class Estimator { kCL = 0, kNL = 1, kRL = 2 };
inline constexpr std::array<Estimator, 3> kEstimators{Estimator::kCL, Estimator::kNL, Estimator::kRL};

std::string_view to_string(Estimator e) noexcept;

/// Default penalty of the simulation study: 0.24 * sqrt(log(p) / n).
double simulation_lambda(int n, int p);
inline constexpr std::string_view kLambdaRule = "0.24*sqrt(log(p)/n)";

struct ExperimentOptions {
  /// Overrides simulation_lambda when set.
  std::optional<double> lambda;
  SolverOptions solver;
  /// Worker threads; 0 means hardware concurrency.
  int threads = 0;
};

struct RunRecord {
  int design_id = 0;
  int replicate = 0;
  Estimator estimator = Estimator::kCL;
  double pred_err = 0.0;
  double est_err = 0.0;
  double censored_frac = 0.0;
  /// Censored objective at the estimate with the run's lambda.
  double objective = 0.0;
  double seconds = 0.0;
  std::uint64_t seed = 0;
  bool converged = true;
  /// Estimator could not run (RL with every row censored); errors are NaN.
  bool is_null = false;
};

struct ErrorSummary {
  double est_mean = 0.0;
  double est_sd = 0.0;
  double pred_mean = 0.0;
  double pred_sd = 0.0;
  int count = 0;
  int nulls = 0;
};

struct AggregateRow {
  int design_id = 0;
  int n = 0, p = 0, s = 0;
  double snr = 0.0;
  double lambda = 0.0;
  std::array<ErrorSummary, 3> by_estimator;  // indexed by Estimator

  [[nodiscard]] const ErrorSummary& operator[](Estimator e) const {
    return by_estimator[static_cast<std::size_t>(e)];
  }
};

struct StudyResult {
  std::vector<AggregateRow> rows;
  std::vector<RunRecord> records;  // sorted by (design, replicate, estimator)
};

/// Seed of replicate r of design d: hash64(base_seed, d, r).
std::uint64_t replicate_seed(std::uint64_t base_seed, int design_id, int replicate);

/// One simulated dataset (cfg with the derived seed), fitted by CL, NL and RL.
std::vector<RunRecord> run_replicate(const DesignConfig& cfg, int design_id, int replicate,
                                     std::uint64_t base_seed, const ExperimentOptions& opts);

/// Mean and sample sd (divisor count - 1) over the non-null records of one design.
AggregateRow aggregate(const DesignConfig& cfg, int design_id, double lambda, const std::vector<RunRecord>& records);

/// Runs the designs (ids 1..k in order) for n_reps replicates each on a worker pool.
/// Output is independent of the thread count.
StudyResult run_study(const std::vector<DesignConfig>& designs, int n_reps, std::uint64_t base_seed,
                      const ExperimentOptions& opts);

AggregateRow run_design(const DesignConfig& cfg, int design_id, int n_reps, std::uint64_t base_seed,
                        const ExperimentOptions& opts);

StudyResult run_table1(int n_reps, std::uint64_t base_seed, const ExperimentOptions& opts);

struct ReportMeta {
  std::uint64_t base_seed = 1;
  int n_reps = 0;
  ExperimentOptions options;
};

/// Writes table1.md, aggregates.csv, records.csv, meta.json and timings.csv
/// into out_dir (created if needed) and returns their paths. All but
/// timings.csv are byte-stable for fixed inputs.
std::vector<std::filesystem::path> emit_report(const StudyResult& result, const ReportMeta& meta,
                                               const std::filesystem::path& out_dir);

}  // namespace cenlad
