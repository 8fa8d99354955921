#include <gtest/gtest.h>

#include <cmath>

#include "cenlad/solver.hpp"
#include "oracles.hpp"

namespace cenlad {
namespace {

using cenlad::testing::grid_minimum;
using cenlad::testing::loop_lad_objective;

TEST(SoftThreshold, Examples) {
  EXPECT_EQ(soft_threshold(3.0, 1.0), 2.0);
  EXPECT_EQ(soft_threshold(-0.5, 1.0), 0.0);
  EXPECT_EQ(soft_threshold(-3.0, 1.0), -2.0);
  for (const double v : {-2.5, 0.0, 1e-9, 7.0}) EXPECT_EQ(soft_threshold(v, 0.0), v);
  Vector v(3);
  v << 3, -0.5, -4;
  EXPECT_EQ(soft_threshold(v, 1.0), (Vector(3) << 2, 0, -3).finished());
}

TEST(SoftThreshold, IsAContraction) {
  CounterRng rng(1);
  for (int k = 0; k < 10000; ++k) {
    const double a = rng.normal(0, 3), b = rng.normal(0, 3), kappa = std::abs(rng.normal());
    ASSERT_LE(std::abs(soft_threshold(a, kappa) - soft_threshold(b, kappa)), std::abs(a - b) + 1e-15);
  }
}

TEST(L1BallProjection, Examples) {
  EXPECT_EQ(l1_ball_projection((Vector(2) << 2, 0).finished(), 1.0), (Vector(2) << 1, 0).finished());
  const Vector inside = (Vector(2) << 0.3, -0.2).finished();
  EXPECT_EQ(l1_ball_projection(inside, 1.0), inside);
  const Vector both = l1_ball_projection(Vector::Ones(2), 1.0);
  EXPECT_NEAR(both[0], 0.5, 1e-15);
  EXPECT_NEAR(both[1], 0.5, 1e-15);
  EXPECT_THROW(l1_ball_projection(inside, 0.0), Error);
}

// [1, 1] -> [0.5, 0.5], confirmed by grid search over the ball's boundary.
TEST(L1BallProjection, MatchesGridSearch) {
  const Vector target = Vector::Ones(2);
  Vector arg;
  grid_minimum(
      2, -1.0, 1.0, 0.001,
      [&](const Vector& b) { return b.lpNorm<1>() <= 1.0 + 1e-12 ? (b - target).squaredNorm() : 1e300; }, &arg);
  const Vector proj = l1_ball_projection(target, 1.0);
  EXPECT_NEAR((proj - arg).lpNorm<Eigen::Infinity>(), 0.0, 1e-3);
}

TEST(L1BallProjection, FeasibleAndNearestOnRandomInputs) {
  CounterRng rng(3);
  for (int k = 0; k < 200; ++k) {
    Vector v(6);
    for (int j = 0; j < 6; ++j) v[j] = rng.normal(0, 2);
    const double radius = 0.1 + 3.0 * rng.uniform();
    const Vector proj = l1_ball_projection(v, radius);
    ASSERT_LE(proj.lpNorm<1>(), radius + 1e-12);
    // No random feasible point is closer.
    for (int t = 0; t < 20; ++t) {
      Vector w(6);
      for (int j = 0; j < 6; ++j) w[j] = rng.normal();
      w *= radius * rng.uniform() / w.lpNorm<1>();
      ASSERT_LE((proj - v).norm(), (w - v).norm() + 1e-12);
    }
  }
}

TEST(SolverOptions, Validation) {
  SolverOptions o;
  EXPECT_NO_THROW(o.validate());
  o.tol_primal = 0.0;
  EXPECT_THROW(o.validate(), Error);
  o = SolverOptions{};
  o.max_iter = 0;
  EXPECT_THROW(o.validate(), Error);
  o = SolverOptions{};
  o.penalty_rho = -1.0;
  EXPECT_THROW(o.validate(), Error);
}

class LadLassoMethods : public ::testing::TestWithParam<SolverMethod> {
 protected:
  SolverOptions options() const {
    SolverOptions o;
    o.method = GetParam();
    return o;
  }
};

// 1-D: (|2 - b|) + lambda |b| is minimized at b = 2 for lambda < 1 and at 0 for lambda > 1.
TEST_P(LadLassoMethods, OneDimensionalExamples) {
  const Matrix X = Matrix::Ones(1, 1);
  const Vector y = Vector::Constant(1, 2.0);
  for (const auto& [lambda, expected] : {std::pair{0.5, 2.0}, std::pair{1.5, 0.0}}) {
    const auto res = lad_lasso(X, y, lambda, options());
    const double oracle = grid_minimum(1, -3, 3, 0.001, [&](const Vector& b) { return loop_lad_objective(X, y, b, lambda); });
    EXPECT_NEAR(res.objective, oracle, 1e-6);
    EXPECT_NEAR(res.beta[0], expected, 1e-4);
    EXPECT_TRUE(res.diagnostics.converged);
  }
}

TEST_P(LadLassoMethods, InterpolatesSquareSystem) {
  Matrix X(3, 3);
  X << 2, 1, 0, 0, 1, -1, 1, 0, 3;
  const Vector beta = (Vector(3) << 1, -2, 0.5).finished();
  const auto res = lad_lasso(X, X * beta, 0.0, options());
  EXPECT_NEAR(res.objective, 0.0, 1e-6);
  EXPECT_NEAR((res.beta - beta).lpNorm<Eigen::Infinity>(), 0.0, 1e-4);
}

TEST_P(LadLassoMethods, NeverWorseThanZero) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = cenlad::testing::tiny_instance(seed, 30, 8);
    const auto res = lad_lasso(inst.X, inst.y, inst.lambda, options());
    EXPECT_LE(res.objective, inst.y.cwiseAbs().mean() + 1e-12);
  }
}

// Grid oracle: objective <= grid minimum + 1e-4 on n <= 10, p <= 3.
TEST_P(LadLassoMethods, GridOracle) {
  for (std::uint64_t seed = 100; seed < 115; ++seed) {
    const auto inst = cenlad::testing::tiny_instance(seed);
    const auto res = lad_lasso(inst.X, inst.y, inst.lambda, options());
    const double grid = grid_minimum(inst.X.cols(), -3, 3, 0.1, [&](const Vector& b) {
      return loop_lad_objective(inst.X, inst.y, b, inst.lambda);
    });
    EXPECT_LE(res.objective, grid + 1e-4) << "seed " << seed;
    EXPECT_NEAR(res.objective, loop_lad_objective(inst.X, inst.y, res.beta, inst.lambda), 1e-12);
  }
}

// Scaling y by k (lambda fixed) maps b to k b and scales the optimum by k.
TEST_P(LadLassoMethods, Homogeneity) {
  const auto inst = cenlad::testing::tiny_instance(7, 20, 5);
  const auto base = lad_lasso(inst.X, inst.y, inst.lambda, options());
  const double k = 3.0;
  const auto scaled = lad_lasso(inst.X, k * inst.y, inst.lambda, options());
  EXPECT_NEAR(scaled.objective, k * base.objective, 1e-5);
  EXPECT_NEAR(loop_lad_objective(inst.X, k * inst.y, k * base.beta, inst.lambda), scaled.objective, 1e-5);
}

TEST_P(LadLassoMethods, RespectsL1Radius) {
  const auto inst = cenlad::testing::tiny_instance(21, 20, 3);
  SolverOptions o = options();
  o.l1_radius = 0.2;
  const auto res = lad_lasso(inst.X, inst.y, 0.0, o);
  EXPECT_LE(res.beta.lpNorm<1>(), 0.2 + 1e-9);
  // Constrained optimum: grid search over the ball.
  const double grid = grid_minimum(inst.X.cols(), -0.2, 0.2, 0.005, [&](const Vector& b) {
    return b.lpNorm<1>() <= 0.2 + 1e-12 ? loop_lad_objective(inst.X, inst.y, b, 0.0) : 1e300;
  });
  EXPECT_LE(res.objective, grid + 1e-4);
}

INSTANTIATE_TEST_SUITE_P(Methods, LadLassoMethods,
                         ::testing::Values(SolverMethod::kInteriorPoint, SolverMethod::kAdmm),
                         [](const auto& info) {
                           return info.param == SolverMethod::kAdmm ? std::string("Admm") : std::string("InteriorPoint");
                         });

TEST(LadLasso, InteriorPointAndAdmmAgree) {
  SolverOptions ipm, admm;
  admm.method = SolverMethod::kAdmm;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto inst = cenlad::testing::tiny_instance(seed * 13, 40, 30);
    const auto a = lad_lasso(inst.X, inst.y, inst.lambda, ipm);
    const auto b = lad_lasso(inst.X, inst.y, inst.lambda, admm);
    EXPECT_NEAR(a.objective, b.objective, 1e-5) << "seed " << seed;
  }
}

TEST(LadLasso, WideProblemCertifiedGap) {
  CounterRng rng(5);
  Matrix X(40, 120);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 120; ++j) X(i, j) = rng.normal();
  Vector y = X.leftCols(3) * Vector::Ones(3);
  for (int i = 0; i < 40; ++i) y[i] += 0.2 * rng.normal();
  const auto res = lad_lasso(X, y, 0.05, SolverOptions{});
  EXPECT_TRUE(res.diagnostics.converged);
  EXPECT_EQ(res.diagnostics.method, SolverMethod::kInteriorPoint);
  EXPECT_LE(res.diagnostics.dual_residual, 1e-6);
}

TEST(LadLasso, AdmmIterationCapIsReported) {
  const auto inst = cenlad::testing::tiny_instance(3, 30, 10);
  SolverOptions o;
  o.method = SolverMethod::kAdmm;
  o.max_iter = 3;
  const auto res = lad_lasso(inst.X, inst.y, inst.lambda, o);
  EXPECT_FALSE(res.diagnostics.converged);
  EXPECT_LE(res.diagnostics.iterations, 3);
  EXPECT_TRUE(res.beta.allFinite());
}

TEST(LadLasso, InputErrors) {
  const Matrix X = Matrix::Ones(2, 1);
  const Vector y = Vector::Ones(2);
  try {
    lad_lasso(X, (Vector(2) << 1, std::nan("")).finished(), 0.1, SolverOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFinite);
  }
  EXPECT_THROW(lad_lasso(X, Vector::Ones(3), 0.1, SolverOptions{}), Error);
  EXPECT_THROW(lad_lasso(X, y, -0.1, SolverOptions{}), Error);
  EXPECT_THROW(lad_lasso(X, y, 0.1, SolverOptions{}, Vector::Zero(2)), Error);
}

}  // namespace
}  // namespace cenlad
