#include "cenlad/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

#include "cenlad/csv_io.hpp"
#include "cenlad/rng.hpp"

namespace cenlad {

namespace {

constexpr std::string_view kArtifactVersion = "1.0.0";

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

RunRecord null_record(int design_id, int replicate, Estimator e, std::uint64_t seed, double censored_frac) {
  RunRecord r;
  r.design_id = design_id;
  r.replicate = replicate;
  r.estimator = e;
  r.seed = seed;
  r.censored_frac = censored_frac;
  r.pred_err = r.est_err = r.objective = std::numeric_limits<double>::quiet_NaN();
  r.converged = false;
  r.is_null = true;
  return r;
}

double resolve_lambda(const DesignConfig& cfg, const ExperimentOptions& opts) {
  return opts.lambda ? *opts.lambda : simulation_lambda(cfg.n, cfg.p);
}

std::string_view method_name(SolverMethod m) {
  return m == SolverMethod::kAdmm ? "admm" : "interior_point";
}

}  // namespace

std::string_view to_string(Estimator e) noexcept {
  switch (e) {
    case Estimator::kCL: return "CL";
    case Estimator::kNL: return "NL";
    case Estimator::kRL: return "RL";
  }
  return "?";
}

double simulation_lambda(int n, int p) {
  if (n < 1 || p < 1) throw Error(ErrorCode::kInvalidArgument, "simulation_lambda needs n, p >= 1");
  return 0.24 * std::sqrt(std::log(static_cast<double>(p)) / n);
}

std::uint64_t replicate_seed(std::uint64_t base_seed, int design_id, int replicate) {
  return hash64(base_seed, static_cast<std::uint64_t>(design_id), static_cast<std::uint64_t>(replicate));
}

std::vector<RunRecord> run_replicate(const DesignConfig& cfg, int design_id, int replicate,
                                     std::uint64_t base_seed, const ExperimentOptions& opts) {
  DesignConfig local = cfg;
  local.seed = replicate_seed(base_seed, design_id, replicate);
  const auto [data, truth] = generate_design(local);
  const double frac = censored_fraction(data);

  FitConfig fit;
  fit.lambda = resolve_lambda(cfg, opts);
  fit.solver = opts.solver;
  // The bounded parameter set B of the simulation: ||beta||_1 <= 10 ||beta0||_1.
  fit.solver.l1_radius = 10.0 * truth.beta0.lpNorm<1>();

  std::vector<RunRecord> records;
  for (const Estimator e : kEstimators) {
    if (e == Estimator::kRL && data.uncensored_rows().empty()) {
      records.push_back(null_record(design_id, replicate, e, local.seed, frac));
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    FitResult result;
    switch (e) {
      case Estimator::kCL: result = fit_cl(data, fit); break;
      case Estimator::kNL: result = fit_nl(data, fit); break;
      case Estimator::kRL: result = fit_rl(data, fit); break;
    }
    RunRecord r;
    r.seconds = elapsed_since(start);
    r.design_id = design_id;
    r.replicate = replicate;
    r.estimator = e;
    r.pred_err = prediction_error(data.X(), result.beta_hat, truth.beta0);
    r.est_err = estimation_error(result.beta_hat, truth.beta0);
    r.censored_frac = frac;
    r.objective = censored_objective(result.beta_hat, data, fit.lambda);
    r.seed = local.seed;
    r.converged = result.converged;
    records.push_back(r);
  }
  return records;
}

namespace {

// A replicate that cannot be simulated or fitted becomes explicit null rows.
std::vector<RunRecord> replicate_or_nulls(const DesignConfig& cfg, int design_id, int rep, std::uint64_t base_seed,
                                          const ExperimentOptions& opts) {
  try {
    return run_replicate(cfg, design_id, rep, base_seed, opts);
  } catch (const Error&) {
    std::vector<RunRecord> nulls;
    const std::uint64_t seed = replicate_seed(base_seed, design_id, rep);
    for (const Estimator e : kEstimators) {
      nulls.push_back(null_record(design_id, rep, e, seed, std::numeric_limits<double>::quiet_NaN()));
    }
    return nulls;
  }
}

unsigned worker_count(const ExperimentOptions& opts, std::size_t tasks) {
  unsigned threads = opts.threads > 0 ? static_cast<unsigned>(opts.threads) : std::thread::hardware_concurrency();
  return std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(tasks)));
}

template <class F>
void run_pool(unsigned threads, F&& worker) {
  if (threads == 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
}

}  // namespace

AggregateRow aggregate(const DesignConfig& cfg, int design_id, double lambda, const std::vector<RunRecord>& records) {
  AggregateRow row;
  row.design_id = design_id;
  row.n = cfg.n;
  row.p = cfg.p;
  row.s = cfg.s;
  row.snr = cfg.snr;
  row.lambda = lambda;
  for (const Estimator e : kEstimators) {
    ErrorSummary& sum = row.by_estimator[static_cast<std::size_t>(e)];
    std::vector<double> est, pred;
    for (const auto& r : records) {
      if (r.design_id != design_id || r.estimator != e) continue;
      if (r.is_null) {
        ++sum.nulls;
        continue;
      }
      est.push_back(r.est_err);
      pred.push_back(r.pred_err);
    }
    sum.count = static_cast<int>(est.size());
    auto mean_sd = [](const std::vector<double>& v, double& mean, double& sd) {
      if (v.empty()) {
        mean = sd = std::numeric_limits<double>::quiet_NaN();
        return;
      }
      double total = 0.0;
      for (const double x : v) total += x;
      mean = total / static_cast<double>(v.size());
      if (v.size() < 2) {
        sd = 0.0;
        return;
      }
      double ss = 0.0;
      for (const double x : v) ss += (x - mean) * (x - mean);
      sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    };
    mean_sd(est, sum.est_mean, sum.est_sd);
    mean_sd(pred, sum.pred_mean, sum.pred_sd);
  }
  return row;
}

StudyResult run_study(const std::vector<DesignConfig>& designs, int n_reps, std::uint64_t base_seed,
                      const ExperimentOptions& opts) {
  if (n_reps < 1) throw Error(ErrorCode::kInvalidArgument, "n_reps must be >= 1");
  for (const auto& cfg : designs) cfg.validate();
  opts.solver.validate();

  const std::size_t n_tasks = designs.size() * static_cast<std::size_t>(n_reps);
  std::vector<std::vector<RunRecord>> slots(n_tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < n_tasks; task = next++) {
      const std::size_t d = task / static_cast<std::size_t>(n_reps);
      const int rep = static_cast<int>(task % static_cast<std::size_t>(n_reps));
      const int design_id = static_cast<int>(d) + 1;
      slots[task] = replicate_or_nulls(designs[d], design_id, rep, base_seed, opts);
    }
  };
  run_pool(worker_count(opts, n_tasks), worker);

  // Slots are already in (design, replicate) order and each holds CL, NL, RL.
  StudyResult result;
  for (auto& slot : slots) {
    for (auto& r : slot) result.records.push_back(r);
  }
  for (std::size_t d = 0; d < designs.size(); ++d) {
    const int design_id = static_cast<int>(d) + 1;
    AggregateRow row = aggregate(designs[d], design_id, resolve_lambda(designs[d], opts), result.records);
    const bool all_failed = std::all_of(row.by_estimator.begin(), row.by_estimator.end(),
                                        [](const ErrorSummary& s) { return s.count == 0; });
    if (all_failed) throw Error(ErrorCode::kInvalidArgument, "every replicate of design " + std::to_string(design_id) + " failed");
    result.rows.push_back(row);
  }
  return result;
}

AggregateRow run_design(const DesignConfig& cfg, int design_id, int n_reps, std::uint64_t base_seed,
                        const ExperimentOptions& opts) {
  if (n_reps < 2) throw Error(ErrorCode::kInvalidArgument, "run_design needs n_reps >= 2");
  cfg.validate();
  std::vector<RunRecord> records;
  std::vector<std::vector<RunRecord>> per_rep(static_cast<std::size_t>(n_reps));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int rep = next++; rep < n_reps; rep = next++) {
      per_rep[static_cast<std::size_t>(rep)] = replicate_or_nulls(cfg, design_id, rep, base_seed, opts);
    }
  };
  run_pool(worker_count(opts, static_cast<std::size_t>(n_reps)), worker);
  for (auto& rep : per_rep) records.insert(records.end(), rep.begin(), rep.end());
  return aggregate(cfg, design_id, resolve_lambda(cfg, opts), records);
}

StudyResult run_table1(int n_reps, std::uint64_t base_seed, const ExperimentOptions& opts) {
  return run_study(table1_designs(), n_reps, base_seed, opts);
}

std::vector<std::filesystem::path> emit_report(const StudyResult& result, const ReportMeta& meta,
                                               const std::filesystem::path& out_dir) {
  if (result.rows.empty()) throw Error(ErrorCode::kInvalidArgument, "no aggregate rows to report");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto open = [&](const char* name) {
    const auto path = out_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot open for writing: " + path.string());
    written.push_back(path);
    return out;
  };
  auto close = [&](std::ofstream& out) {
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write failed: " + written.back().string());
  };
  auto fixed2 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  {
    auto out = open("table1.md");
    out << "| design | n | p | s | SNR | est CL | est NL | est RL | pred CL | pred NL | pred RL |\n"
        << "|---:|---:|---:|---:|---:|---|---|---|---|---|---|\n";
    for (const auto& row : result.rows) {
      out << "| " << row.design_id << " | " << row.n << " | " << row.p << " | " << row.s << " | "
          << format_double(row.snr);
      for (const Estimator e : kEstimators) out << " | " << fixed2(row[e].est_mean) << " (" << fixed2(row[e].est_sd) << ")";
      for (const Estimator e : kEstimators) out << " | " << fixed2(row[e].pred_mean) << " (" << fixed2(row[e].pred_sd) << ")";
      out << " |\n";
    }
    out << "\nMean (sd) over " << meta.n_reps
        << " replicates. Estimation error ||b - b0||_1; prediction error (1/n) sum (x_i (b - b0))^2.\n";
    close(out);
  }
  {
    auto out = open("aggregates.csv");
    out << "design_id,n,p,s,snr,lambda";
    for (const Estimator e : kEstimators) {
      const std::string t(to_string(e));
      out << ',' << t << "_est_mean," << t << "_est_sd," << t << "_pred_mean," << t << "_pred_sd," << t << "_count,"
          << t << "_nulls";
    }
    out << '\n';
    for (const auto& row : result.rows) {
      out << row.design_id << ',' << row.n << ',' << row.p << ',' << row.s << ',' << format_double(row.snr) << ','
          << format_double(row.lambda);
      for (const Estimator e : kEstimators) {
        const auto& s = row[e];
        out << ',' << format_double(s.est_mean) << ',' << format_double(s.est_sd) << ',' << format_double(s.pred_mean)
            << ',' << format_double(s.pred_sd) << ',' << s.count << ',' << s.nulls;
      }
      out << '\n';
    }
    close(out);
  }
  {
    auto out = open("records.csv");
    out << "design_id,replicate,estimator,seed,pred_err,est_err,censored_frac,objective,converged\n";
    for (const auto& r : result.records) {
      if (r.is_null) continue;
      out << r.design_id << ',' << r.replicate << ',' << to_string(r.estimator) << ',' << r.seed << ','
          << format_double(r.pred_err) << ',' << format_double(r.est_err) << ',' << format_double(r.censored_frac) << ','
          << format_double(r.objective) << ',' << (r.converged ? 1 : 0) << '\n';
    }
    close(out);
  }
  {
    auto out = open("timings.csv");
    out << "design_id,replicate,estimator,seconds\n";
    for (const auto& r : result.records) {
      if (r.is_null) continue;
      out << r.design_id << ',' << r.replicate << ',' << to_string(r.estimator) << ',' << format_double(r.seconds) << '\n';
    }
    close(out);
  }
  {
    const auto& opts = meta.options;
    nlohmann::json j;
    j["artifact"] = "cenlad";
    j["version"] = kArtifactVersion;
    j["base_seed"] = meta.base_seed;
    j["replicates"] = meta.n_reps;
    j["designs"] = result.rows.size();
    j["seed_rule"] = "hash64(base_seed, design_id, replicate)";
    j["lambda_rule"] = opts.lambda ? "fixed" : std::string(kLambdaRule);
    if (opts.lambda) j["lambda"] = *opts.lambda;
    j["sd_divisor"] = "n-1";
    j["prediction_error"] = "(1/n) sum_i (x_i (beta_hat - beta0))^2";
    j["estimation_error"] = "||beta_hat - beta0||_1";
    j["snr"] = "sqrt(sum (x_i beta0 v 0)^2 / sum eps_i^2), enforced on each sample";
    j["cl_restarts"] = {"zero", "nl", "rl"};
    j["solver"] = {{"method", method_name(opts.solver.method)},
                   {"tol_primal", opts.solver.tol_primal},
                   {"tol_dual", opts.solver.tol_dual},
                   {"max_iter", opts.solver.max_iter},
                   {"l1_radius", "10*||beta0||_1"},
                   {"penalty_rho", opts.solver.penalty_rho}};
    auto out = open("meta.json");
    out << j.dump(2) << '\n';
    close(out);
  }
  return written;
}

}  // namespace cenlad
