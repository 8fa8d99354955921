#include "cenlad/estimators.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace cenlad {

std::string_view to_string(RestartTag tag) noexcept {
  switch (tag) {
    case RestartTag::kZero: return "zero";
    case RestartTag::kNlSolution: return "nl";
    case RestartTag::kRlSolution: return "rl";
  }
  return "unknown";
}

void FitConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be finite and >= 0");
  }
  if (max_outer_iter < 1) throw Error(ErrorCode::kInvalidArgument, "max_outer_iter must be >= 1");
  if (restarts.empty()) throw Error(ErrorCode::kInvalidArgument, "at least one restart is required");
  if (!(outer_tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "outer_tol must be > 0");
  if (exhaustive_max_n < 0 || exhaustive_max_n > 20) {
    throw Error(ErrorCode::kInvalidArgument, "exhaustive_max_n must be in [0, 20]");
  }
  solver.validate();
}

namespace {

void require_nonempty(const Dataset& data) {
  if (data.n() == 0 || data.p() == 0) throw Error(ErrorCode::kEmptyData, "dataset has no rows or columns");
}

FitResult finish(const Dataset& data, Vector beta, double objective, int iterations, bool converged) {
  FitResult fit;
  fit.active_obs = active_observations(data, beta);
  fit.beta_hat = std::move(beta);
  fit.objective = objective;
  fit.iterations = iterations;
  fit.restarts_used = 1;
  fit.converged = converged;
  return fit;
}

struct RestartOutcome {
  Vector beta;
  double objective = 0.0;
  int iterations = 0;
  RestartLog log;
};

// Minimizer of the objective with the rows outside `active` held at their censored loss.
Vector solve_on_active(const Dataset& data, const FitConfig& cfg, const IndexList& active, const Vector& warm) {
  // (1/n) sum over active rows == (|A|/n) * (LAD-LASSO on A with lambda n/|A|).
  const Dataset sub = data.subset(active);
  const double sub_lambda = cfg.lambda * static_cast<double>(data.n()) / static_cast<double>(active.size());
  const auto solved = lad_lasso(sub.X(), sub.y(), sub_lambda, cfg.solver, warm);
  return l1_ball_projection(solved.beta, cfg.solver.l1_radius);
}

RestartOutcome run_restart(const Dataset& data, const FitConfig& cfg, RestartTag tag, Vector start) {
  RestartOutcome out;
  out.log.tag = tag;
  out.beta = l1_ball_projection(start, cfg.solver.l1_radius);
  out.objective = censored_objective(out.beta, data, cfg.lambda);
  out.log.objectives.push_back(out.objective);

  IndexList active = active_observations(data, out.beta);
  for (int k = 0; k < cfg.max_outer_iter; ++k) {
    if (active.empty()) {
      out.log.degenerate = true;
      return out;
    }
    Vector candidate = solve_on_active(data, cfg, active, out.beta);
    const double candidate_obj = censored_objective(candidate, data, cfg.lambda);
    if (candidate_obj > out.objective) {
      // No-increase guard: the current iterate is already as good as this scheme gets.
      out.log.converged = true;
      return out;
    }
    const double decrease = out.objective - candidate_obj;
    out.beta = std::move(candidate);
    out.objective = candidate_obj;
    out.log.objectives.push_back(out.objective);
    ++out.iterations;

    IndexList next_active = active_observations(data, out.beta);
    if (next_active == active || decrease < cfg.outer_tol) {
      out.log.converged = true;
      return out;
    }
    active = std::move(next_active);
  }
  return out;
}

void subset_search(const Dataset& data, const FitConfig& cfg, RestartOutcome& best) {
  const auto n = static_cast<std::uint32_t>(data.n());
  for (std::uint32_t mask = 1; mask < (1U << n); ++mask) {
    IndexList rows;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (mask & (1U << i)) rows.push_back(static_cast<Eigen::Index>(i));
    }
    RestartOutcome trial = run_restart(data, cfg, best.log.tag, solve_on_active(data, cfg, rows, best.beta));
    if (trial.objective < best.objective - cfg.outer_tol) {
      trial.iterations += best.iterations;
      best = std::move(trial);
    }
  }
}

}  // namespace

FitResult fit_nl(const Dataset& data, const FitConfig& cfg) {
  cfg.validate();
  require_nonempty(data);
  const auto solved = lad_lasso(data.X(), data.y(), cfg.lambda, cfg.solver);
  return finish(data, solved.beta, solved.objective, solved.diagnostics.iterations, solved.diagnostics.converged);
}

FitResult fit_rl(const Dataset& data, const FitConfig& cfg) {
  cfg.validate();
  require_nonempty(data);
  const IndexList rows = data.uncensored_rows();
  if (rows.empty()) throw Error(ErrorCode::kNoUncensoredRows, "every observation is censored");
  const Dataset sub = data.subset(rows);
  const auto solved = lad_lasso(sub.X(), sub.y(), cfg.lambda, cfg.solver);
  return finish(data, solved.beta, solved.objective, solved.diagnostics.iterations, solved.diagnostics.converged);
}

CensoredFit fit_cl_detailed(const Dataset& data, const FitConfig& cfg) {
  cfg.validate();
  require_nonempty(data);

  CensoredFit fit;
  std::optional<RestartOutcome> best;
  int restarts_run = 0;
  for (const RestartTag tag : cfg.restarts) {
    Vector start;
    switch (tag) {
      case RestartTag::kZero:
        start = Vector::Zero(data.p());
        break;
      case RestartTag::kNlSolution:
        start = fit_nl(data, cfg).beta_hat;
        break;
      case RestartTag::kRlSolution:
        if (data.uncensored_rows().empty()) {
          RestartLog skipped;
          skipped.tag = tag;
          skipped.skipped = true;
          fit.restarts.push_back(std::move(skipped));
          continue;
        }
        start = fit_rl(data, cfg).beta_hat;
        break;
    }
    ++restarts_run;
    RestartOutcome outcome = run_restart(data, cfg, tag, std::move(start));
    fit.restarts.push_back(outcome.log);
    if (outcome.log.degenerate && outcome.iterations == 0) continue;
    if (!best || outcome.objective < best->objective) best = std::move(outcome);
  }

  if (best && data.n() <= cfg.exhaustive_max_n) subset_search(data, cfg, *best);

  if (!best) {
    Vector zero = Vector::Zero(data.p());
    const double objective = censored_objective(zero, data, cfg.lambda);
    fit.result = finish(data, std::move(zero), objective, 0, false);
  } else {
    fit.result = finish(data, best->beta, best->objective, best->iterations,
                        best->log.converged && !best->log.degenerate);
  }
  fit.result.restarts_used = restarts_run;
  return fit;
}

FitResult fit_cl(const Dataset& data, const FitConfig& cfg) { return fit_cl_detailed(data, cfg).result; }

FitResult fit_powell(const Dataset& data, const SolverOptions& solver) {
  FitConfig cfg;
  cfg.lambda = 0.0;
  cfg.solver = solver;
  return fit_cl(data, cfg);
}

}  // namespace cenlad
