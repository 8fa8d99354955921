#include <gtest/gtest.h>

#include <cmath>

#include "cenlad/datagen.hpp"
#include "cenlad/estimators.hpp"
#include "cenlad/rng.hpp"
#include "oracles.hpp"

namespace cenlad {
namespace {

using cenlad::testing::grid_minimum;
using cenlad::testing::loop_censored_objective;

TEST(FitConfig, Validation) {
  FitConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.lambda = -1;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = FitConfig{};
  cfg.restarts.clear();
  EXPECT_THROW(cfg.validate(), Error);
  cfg = FitConfig{};
  cfg.max_outer_iter = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = FitConfig{};
  cfg.exhaustive_max_n = 21;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(FitCl, UncensoredReducesToLadLasso) {
  DesignConfig design = DesignConfig::constant_censoring(40, 20, 3, 4.0, -1e9);
  const auto [data, truth] = generate_design(design);
  FitConfig cfg;
  cfg.lambda = 0.05;
  const FitResult cl = fit_cl(data, cfg);
  const auto lad = lad_lasso(data.X(), data.y(), cfg.lambda, cfg.solver);
  EXPECT_NEAR(cl.objective, lad.objective, 1e-6);
  const FitResult nl = fit_nl(data, cfg);
  const FitResult rl = fit_rl(data, cfg);
  EXPECT_NEAR(nl.objective, cl.objective, 2e-7);
  EXPECT_EQ(rl.beta_hat, nl.beta_hat);
}

TEST(FitCl, NoWorseThanTruthOnSmallExample) {
  Matrix X(4, 1);
  X << 1, 1, -1, -1;
  const Vector c = Vector::Zero(4);
  const Vector y = (X * Vector::Ones(1)).cwiseMax(c);
  const Dataset d(X, y, c);
  FitConfig cfg;
  cfg.lambda = 0.01;
  const FitResult fit = fit_cl(d, cfg);
  EXPECT_LE(fit.objective, censored_objective(Vector::Ones(1), d, cfg.lambda) + 1e-12);
}

// Returned objective <= grid minimum over {-2, -1.9, ..., 2}^p + 1e-3.
TEST(FitCl, GridOracleOnTinyInstances) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto inst = cenlad::testing::tiny_instance(seed * 7, 6, 2);
    const Dataset d(inst.X, inst.y, inst.c);
    FitConfig cfg;
    cfg.lambda = inst.lambda;
    const FitResult fit = fit_cl(d, cfg);
    const double grid = grid_minimum(d.p(), -2, 2, 0.1, [&](const Vector& b) {
      return loop_censored_objective(inst.X, inst.y, inst.c, b, inst.lambda);
    });
    EXPECT_LE(fit.objective, grid + 1e-3) << "seed " << seed;
  }
}

// n = 4 instance whose optimum needs one row to enter and another to leave
// the active set at once; the restarts alone stop at a worse local minimum.
TEST(FitCl, SubsetStartsEscapeLocalMinimum) {
  const auto inst = cenlad::testing::tiny_instance(hash64(3, 64, 0));
  const Dataset d(inst.X, inst.y, inst.c);
  const double grid = grid_minimum(d.p(), -3, 3, 0.1, [&](const Vector& b) {
    return loop_censored_objective(inst.X, inst.y, inst.c, b, inst.lambda);
  });
  FitConfig cfg;
  cfg.lambda = inst.lambda;
  cfg.exhaustive_max_n = 0;
  EXPECT_GT(fit_cl(d, cfg).objective, grid + 1e-3);
  cfg.exhaustive_max_n = 12;
  EXPECT_LE(fit_cl(d, cfg).objective, grid + 1e-6);
}

TEST(FitCl, ObjectiveIsRecomputable) {
  DesignConfig design;
  design.seed = 4;
  const auto [data, truth] = generate_design(design);
  FitConfig cfg;
  cfg.lambda = 0.06;
  const FitResult fit = fit_cl(data, cfg);
  EXPECT_NEAR(fit.objective, censored_objective(fit.beta_hat, data, cfg.lambda), 1e-10);
  EXPECT_EQ(fit.active_obs, active_observations(data, fit.beta_hat));
  EXPECT_EQ(fit.restarts_used, 3);
}

TEST(FitCl, RestartLogsDescend) {
  DesignConfig design;
  design.seed = 8;
  const auto [data, truth] = generate_design(design);
  FitConfig cfg;
  cfg.lambda = 0.06;
  const CensoredFit fit = fit_cl_detailed(data, cfg);
  ASSERT_EQ(fit.restarts.size(), 3U);
  for (const auto& log : fit.restarts) {
    for (std::size_t k = 1; k < log.objectives.size(); ++k) {
      EXPECT_LE(log.objectives[k], log.objectives[k - 1]) << to_string(log.tag);
    }
  }
}

TEST(FitCl, AddingRestartsNeverHurts) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    DesignConfig design;
    design.seed = seed;
    const auto [data, truth] = generate_design(design);
    FitConfig one;
    one.lambda = 0.06;
    one.restarts = {RestartTag::kZero};
    FitConfig all = one;
    all.restarts = {RestartTag::kZero, RestartTag::kNlSolution, RestartTag::kRlSolution};
    EXPECT_LE(fit_cl(data, all).objective, fit_cl(data, one).objective + 1e-15);
  }
}

TEST(FitCl, FeasibleForSmallRadius) {
  DesignConfig design;
  const auto [data, truth] = generate_design(design);
  FitConfig cfg;
  cfg.lambda = 0.01;
  cfg.solver.l1_radius = 0.5;
  EXPECT_LE(fit_cl(data, cfg).beta_hat.lpNorm<1>(), 0.5 + 1e-9);
}

TEST(FitCl, AllRestartsDegenerate) {
  // Every response sits at a censoring level of 100 and the only start is 0.
  const Dataset d(Matrix::Ones(3, 2), Vector::Constant(3, 100.0), Vector::Constant(3, 100.0));
  FitConfig cfg;
  cfg.lambda = 0.1;
  cfg.restarts = {RestartTag::kZero};
  const CensoredFit fit = fit_cl_detailed(d, cfg);
  EXPECT_FALSE(fit.result.converged);
  EXPECT_EQ(fit.result.beta_hat, Vector::Zero(2));
  ASSERT_EQ(fit.restarts.size(), 1U);
  EXPECT_TRUE(fit.restarts[0].degenerate);
}

TEST(FitCl, PenaltyPlumbing) {
  DesignConfig design;
  const auto [data, truth] = generate_design(design);
  FitConfig cfg;
  cfg.lambda = 0.08;
  const Vector b = fit_cl(data, cfg).beta_hat;
  EXPECT_GE(censored_objective(b, data, 0.08), censored_objective(b, data, 0.04));
}

TEST(FitNl, FullyCensoredLargeLambdaGivesZero) {
  DesignConfig design;
  const auto [data, truth] = generate_design(design);
  const Dataset censored(data.X(), Vector::Zero(data.n()), Vector::Zero(data.n()));
  FitConfig cfg;
  cfg.lambda = 10.0;
  EXPECT_EQ(fit_nl(censored, cfg).beta_hat.lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(FitRl, UsesOnlyUncensoredRows) {
  Matrix X(4, 1);
  X << 1, 2, 3, 4;
  Vector y(4), c(4);
  y << 1.0, 0.0, 5.0, 0.0;
  c << 0.0, 0.0, 0.0, 0.0;  // rows 1 and 3 (0-based 0 and 2) uncensored
  const Dataset d(X, y, c);
  FitConfig cfg;
  cfg.lambda = 0.01;
  const FitResult rl = fit_rl(d, cfg);
  const Dataset sub = d.subset({0, 2});
  const auto ref = lad_lasso(sub.X(), sub.y(), cfg.lambda, cfg.solver);
  EXPECT_NEAR(rl.objective, ref.objective, 1e-12);
  EXPECT_EQ(rl.beta_hat, ref.beta);
}

TEST(FitRl, NoUncensoredRowsIsAnError) {
  const Dataset d(Matrix::Ones(3, 1), Vector::Zero(3), Vector::Zero(3));
  try {
    fit_rl(d, FitConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoUncensoredRows);
  }
  // fit_cl skips the RL restart instead.
  const CensoredFit fit = fit_cl_detailed(d, FitConfig{});
  EXPECT_TRUE(fit.restarts.back().skipped);
}

TEST(FitPowell, EqualsUnpenalisedCl) {
  DesignConfig design = DesignConfig::constant_censoring(50, 2, 2, 8.0, 0.0);
  const auto [data, truth] = generate_design(design);
  FitConfig cfg;
  cfg.lambda = 0.0;
  EXPECT_NEAR(fit_powell(data, SolverOptions{}).objective, fit_cl(data, cfg).objective, 1e-10);
}

TEST(FitPowell, ConsistentOnZeroCensoredDesign) {
  double total = 0.0;
  constexpr int kReps = 10;
  for (int r = 0; r < kReps; ++r) {
    DesignConfig design = DesignConfig::constant_censoring(50, 2, 2, 8.0, 0.0);
    design.seed = 1000 + static_cast<std::uint64_t>(r);
    const auto [data, truth] = generate_design(design);
    total += estimation_error(fit_powell(data, SolverOptions{}).beta_hat, truth.beta0);
  }
  EXPECT_LT(total / kReps, 0.3);
}

TEST(FitPowell, UncensoredMatchesLad) {
  DesignConfig design = DesignConfig::constant_censoring(30, 3, 2, 4.0, -1e9);
  const auto [data, truth] = generate_design(design);
  const auto lad = lad_lasso(data.X(), data.y(), 0.0, SolverOptions{});
  EXPECT_NEAR(fit_powell(data, SolverOptions{}).objective, lad.objective, 1e-6);
}

}  // namespace
}  // namespace cenlad
