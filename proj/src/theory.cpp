#include "cenlad/theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cenlad/rng.hpp"
#include "cenlad/solver.hpp"

namespace cenlad {

void TheoryParams::validate() const {
  const double fields[] = {K_X, K0, C1_sq, C2, C, phi0_sq, Lambda_sq, L, eps0, alpha_eps};
  for (const double v : fields) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "theory constants must be > 0");
  }
  if (std::abs(C - 1.0 / (std::sqrt(C1_sq) * C2)) > 1e-12 * std::max(1.0, C)) {
    throw Error(ErrorCode::kInvalidArgument, "C must equal 1 / (C1 * C2)");
  }
}

double lambda_t(double K_X, int p, int n, double t) {
  if (p < 1 || n < 1) throw Error(ErrorCode::kInvalidArgument, "lambda_t needs p >= 1 and n >= 1");
  if (!(K_X >= 0.0) || !(t >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda_t needs K_X, t >= 0");
  const double nn = static_cast<double>(n);
  return 4.0 * K_X * std::sqrt(2.0 * std::log(2.0 * p) / nn) + K_X * std::sqrt(8.0 * t / nn);
}

OracleBounds oracle_bounds(double lambda, int s, double C, double phi0_sq) {
  if (!(phi0_sq > 0.0)) throw Error(ErrorCode::kInvalidArgument, "phi0_sq must be > 0");
  const double k = static_cast<double>(s) * C / phi0_sq;
  return {9.0 * lambda * lambda * k, 6.0 * lambda * k};
}

// ---------------------------------------------------------------------------
// Compatibility constant

namespace {

/// Euclidean projection onto the probability simplex (Duchi et al. 2008).
Vector simplex_projection(const Vector& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumsum += u[k];
    const double candidate = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

struct ConeQp {
  const Matrix& Sigma;
  IndexList S;
  IndexList Sc;
  double step;

  Vector project(const Vector& b, const Vector& signs) const {
    Vector out(b.size());
    Vector w(static_cast<Eigen::Index>(S.size()));
    for (std::size_t k = 0; k < S.size(); ++k) w[k] = signs[k] * b[S[k]];
    w = simplex_projection(w);
    for (std::size_t k = 0; k < S.size(); ++k) out[S[k]] = signs[k] * w[k];
    if (!Sc.empty()) {
      Vector v(static_cast<Eigen::Index>(Sc.size()));
      for (std::size_t k = 0; k < Sc.size(); ++k) v[k] = b[Sc[k]];
      v = l1_ball_projection(v, 3.0);
      for (std::size_t k = 0; k < Sc.size(); ++k) out[Sc[k]] = v[k];
    }
    return out;
  }

  /// min b'Sigma b over the region with sign pattern `signs` on S.
  double solve(const Vector& signs) const {
    Vector x = Vector::Zero(Sigma.rows());
    for (std::size_t k = 0; k < S.size(); ++k) x[S[k]] = signs[k] / static_cast<double>(S.size());
    Vector y = x;
    double momentum = 1.0;
    double fx = x.dot(Sigma * x);
    for (int it = 0; it < 20000; ++it) {
      const Vector x_next = project(y - step * 2.0 * (Sigma * y), signs);
      const double f_next = x_next.dot(Sigma * x_next);
      if (f_next > fx) {
        // Adaptive restart: drop the momentum and retry from x.
        y = x;
        momentum = 1.0;
        if (it > 0 && (x_next - x).lpNorm<Eigen::Infinity>() < 1e-14) break;
        continue;
      }
      const double m_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      const double moved = (x_next - x).lpNorm<Eigen::Infinity>();
      y = x_next + ((momentum - 1.0) / m_next) * (x_next - x);
      x = x_next;
      fx = f_next;
      momentum = m_next;
      if (moved < 1e-13) break;
    }
    return fx;
  }
};

}  // namespace

CompatibilityResult compatibility_constant(const Matrix& Sigma, const IndexList& S) {
  const Eigen::Index p = Sigma.rows();
  if (Sigma.cols() != p) throw Error(ErrorCode::kDimensionMismatch, "Sigma must be square");
  if (S.empty()) throw Error(ErrorCode::kInvalidArgument, "S must be nonempty");
  if (!Sigma.allFinite()) throw Error(ErrorCode::kNonFinite, "Sigma has non-finite entries");
  if ((Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() > 1e-8) {
    throw Error(ErrorCode::kNotSymmetric, "Sigma is not symmetric within 1e-8");
  }
  std::vector<bool> in_s(static_cast<std::size_t>(p), false);
  for (const auto j : S) {
    if (j < 0 || j >= p) throw Error(ErrorCode::kInvalidArgument, "S index out of range");
    if (in_s[j]) throw Error(ErrorCode::kInvalidArgument, "S has duplicate indices");
    in_s[j] = true;
  }

  const Matrix sym = 0.5 * (Sigma + Sigma.transpose());
  const double top = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  CompatibilityResult result;
  if (!(top > 0.0)) return result;  // Sigma == 0 (PSD assumed)

  ConeQp qp{sym, S, {}, 1.0 / (2.0 * top)};
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!in_s[j]) qp.Sc.push_back(j);
  }

  const int s = static_cast<int>(S.size());
  const int free_bits = s - 1;  // the first sign is fixed to +1
  double best = std::numeric_limits<double>::infinity();
  Vector signs(s);
  auto visit = [&](std::uint64_t bits) {
    signs[0] = 1.0;
    for (int k = 1; k < s; ++k) signs[k] = ((bits >> (k - 1)) & 1U) != 0 ? -1.0 : 1.0;
    best = std::min(best, qp.solve(signs));
  };
  if (s <= kMaxExactSupport) {
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << free_bits); ++bits) visit(bits);
  } else {
    result.exact = false;
    CounterRng rng(mix64(static_cast<std::uint64_t>(s) * 7919U + static_cast<std::uint64_t>(p)));
    visit(0);
    for (int k = 0; k < 511; ++k) visit(rng());
  }
  result.value = std::max(0.0, static_cast<double>(s) * best);
  return result;
}

// ---------------------------------------------------------------------------
// Margin constant

double margin_h(double z, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be > 0");
  const double a = std::abs(z);  // h is even
  if (a == 0.0) return 0.0;
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  auto integrand = [&](double e) { return (a - e) * norm * std::exp(-0.5 * e * e / (sigma * sigma)); };
  return 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, a, 15, 1e-12);
}

MarginConstants margin_constant(double error_sigma, double K0) {
  if (!(error_sigma > 0.0) || !std::isfinite(error_sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "error_sigma must be > 0");
  }
  if (!(K0 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "K0 must be > 0");
  MarginConstants m;
  const double root_two_pi = std::sqrt(2.0 * std::numbers::pi);
  m.Lambda_sq = 1.0 / (error_sigma * root_two_pi);
  // |d/dz density| = |z| / sigma^2 * density, maximal at |z| = sigma.
  m.L = std::exp(-0.5) / (error_sigma * error_sigma * root_two_pi);
  m.eps0 = m.Lambda_sq / (2.0 * m.L / 3.0);
  if (m.eps0 >= K0) {
    m.eps0_exceeds_K0 = true;
    m.alpha_eps = margin_h(m.eps0, error_sigma);
    m.C1_sq = m.eps0;
    return m;
  }
  // Dense scan rather than relying on monotonicity of h.
  constexpr int kGrid = 400;
  double inf_h = margin_h(m.eps0, error_sigma);
  for (int k = 1; k <= kGrid; ++k) {
    const double z = m.eps0 + (K0 - m.eps0) * k / kGrid;
    inf_h = std::min(inf_h, margin_h(z, error_sigma));
  }
  m.alpha_eps = inf_h;
  m.C1_sq = std::min(m.eps0, m.alpha_eps / (K0 * K0));
  return m;
}

// ---------------------------------------------------------------------------
// Censoring constant

CensoringConstantEstimate censoring_constant_check(const GroundTruth& truth, const DesignConfig& design,
                                                   int n_dirs, Eigen::Index n_mc, std::uint64_t seed) {
  if (n_dirs < 1 || n_mc < 1) throw Error(ErrorCode::kInvalidArgument, "n_dirs and n_mc must be >= 1");
  const PopulationSample pop = sample_population(design, truth, n_mc, seed);
  const Vector f0 = (pop.X * truth.beta0).cwiseMax(pop.c);
  const Eigen::Index p = truth.beta0.size();
  std::vector<bool> in_s(static_cast<std::size_t>(p), false);
  for (const auto j : truth.active_set) in_s[j] = true;

  CensoringConstantEstimate est;
  est.C2_hat = std::numeric_limits<double>::infinity();
  const double m = static_cast<double>(n_mc);
  for (int k = 0; k < n_dirs; ++k) {
    CounterRng rng(hash64(seed, 2, static_cast<std::uint64_t>(k)));
    Vector delta = Vector::Zero(p);
    double l1_s = 0.0;
    for (const auto j : truth.active_set) {
      delta[j] = rng.normal();
      l1_s += std::abs(delta[j]);
    }
    Vector off = Vector::Zero(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!in_s[j]) off[j] = rng.normal();
    }
    const double off_l1 = off.lpNorm<1>();
    if (off_l1 > 0.0) delta += off * (3.0 * l1_s * rng.uniform() / off_l1);
    const double total = delta.lpNorm<1>();
    if (!(total > 0.0)) {
      ++est.skipped;
      continue;
    }
    // ||delta||_1 log-uniform on [0.1, 10].
    delta *= std::exp(std::log(0.1) + rng.uniform() * std::log(100.0)) / total;

    const Vector lin = pop.X * delta;
    const Vector gap = (pop.X * (truth.beta0 + delta)).cwiseMax(pop.c) - f0;
    const Eigen::ArrayXd a = gap.array().square();
    const Eigen::ArrayXd b = lin.array().square();
    const double mean_b = b.mean();
    if (!(mean_b > 0.0)) {
      ++est.skipped;
      continue;
    }
    const double ratio = a.mean() / mean_b;
    est.ratios.push_back(ratio);
    if (ratio < est.C2_hat) {
      est.C2_hat = ratio;
      const Eigen::ArrayXd lin_resid = a - ratio * b;
      const double var = n_mc > 1 ? lin_resid.square().sum() / (m - 1.0) : 0.0;
      est.std_error = std::sqrt(var / m) / mean_b;
    }
  }
  if (est.ratios.empty()) throw Error(ErrorCode::kInvalidArgument, "every direction had a zero denominator");
  return est;
}

// ---------------------------------------------------------------------------
// Concentration inequality


namespace {

/// (1/m) sum |y - max(lin, c)| - base, for a linear predictor lin = X b.
double mean_loss_gap(const Vector& y, const Vector& c, const Vector& base, const Vector& lin) {
  return ((y - lin.cwiseMax(c)).cwiseAbs() - base).mean();
}

}  // namespace

ConcentrationResult concentration_mc(const GroundTruth& truth, const DesignConfig& design, double M, double t,
                                     int n_dirs, int n_reps, std::uint64_t seed, Eigen::Index pop_size) {
  if (!(M > 0.0) || !(t > 0.0) || n_dirs < 1 || n_reps < 1 || pop_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "concentration_mc needs positive M, t, n_dirs, n_reps, pop_size");
  }
  const Eigen::Index p = truth.beta0.size();
  const PopulationSample pop = sample_population(design, truth, pop_size, hash64(seed, 0, 0));
  const Vector pop_y = pop.responses(truth.beta0);
  const Vector pop_lin0 = pop.X * truth.beta0;
  const Vector pop_base = (pop_y - pop_lin0.cwiseMax(pop.c)).cwiseAbs();

  // Candidates b0 + d: the 2p vertices M(+-e_j), then random points of the sphere.
  // Their population terms are shared by every replicate.
  std::vector<Vector> offsets;
  for (Eigen::Index j = 0; j < p; ++j) {
    for (const double sgn : {1.0, -1.0}) {
      Vector d = Vector::Zero(p);
      d[j] = sgn * M;
      offsets.push_back(std::move(d));
    }
  }
  CounterRng dir_rng(hash64(seed, 0, 1));
  for (int k = 0; k < n_dirs; ++k) {
    Vector d(p);
    for (Eigen::Index j = 0; j < p; ++j) d[j] = dir_rng.normal();
    offsets.push_back(d * (M / d.lpNorm<1>()));
  }
  auto vertex_lin = [&](const Matrix& X, const Vector& lin0, Eigen::Index k) -> Vector {
    const double sgn = k % 2 == 0 ? 1.0 : -1.0;
    return lin0 + (sgn * M) * X.col(k / 2);
  };
  std::vector<double> cand_pop(offsets.size());
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    const Vector lin = k < static_cast<std::size_t>(2 * p) ? vertex_lin(pop.X, pop_lin0, static_cast<Eigen::Index>(k))
                                                          : Vector(pop_lin0 + pop.X * offsets[k]);
    cand_pop[k] = mean_loss_gap(pop_y, pop.c, pop_base, lin);
  }

  ConcentrationResult result;
  int exceed = 0;
  for (int r = 0; r < n_reps; ++r) {
    const PopulationSample rep =
        sample_population(design, truth, design.n, hash64(seed, 1, static_cast<std::uint64_t>(r)));
    const Vector y = rep.responses(truth.beta0);
    const Vector lin0 = rep.X * truth.beta0;
    const Vector base = (y - lin0.cwiseMax(rep.c)).cwiseAbs();

    std::size_t best_k = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      const double z = std::abs(mean_loss_gap(y, rep.c, base, lin0 + rep.X * offsets[k]) - cand_pop[k]);
      if (z > best) {
        best = z;
        best_k = k;
      }
    }
    // Local refinement: midpoints towards the vertices stay inside the ball.
    // Linear predictors are cached so each trial costs O(pop_size).
    Vector cur_pop = pop_lin0 + pop.X * offsets[best_k];
    Vector cur_rep = lin0 + rep.X * offsets[best_k];
    for (int round = 0; round < 2; ++round) {
      bool improved = false;
      for (Eigen::Index k = 0; k < 2 * p; ++k) {
        const Vector mid_pop = 0.5 * (cur_pop + vertex_lin(pop.X, pop_lin0, k));
        const Vector mid_rep = 0.5 * (cur_rep + vertex_lin(rep.X, lin0, k));
        const double z = std::abs(mean_loss_gap(y, rep.c, base, mid_rep) - mean_loss_gap(pop_y, pop.c, pop_base, mid_pop));
        if (z > best) {
          best = z;
          cur_pop = mid_pop;
          cur_rep = mid_rep;
          improved = true;
        }
      }
      if (!improved) break;
    }

    const double K_X = rep.X.cwiseAbs().maxCoeff();
    const double threshold = M * lambda_t(K_X, static_cast<int>(p), design.n, t);
    result.z_lower.push_back(best);
    result.threshold.push_back(threshold);
    if (best >= threshold) ++exceed;
  }
  result.exceedance_freq = static_cast<double>(exceed) / n_reps;
  return result;
}

}  // namespace cenlad
