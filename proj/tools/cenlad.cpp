// Command-line front end: gen, fit, theory, table1.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 solver did not
// converge (fit only).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cenlad/csv_io.hpp"
#include "cenlad/datagen.hpp"
#include "cenlad/estimators.hpp"
#include "cenlad/harness.hpp"
#include "cenlad/theory.hpp"

namespace {

using namespace cenlad;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNoConvergence = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// "6" picks a reference design by number; "n,p,s,snr" builds one.
DesignConfig parse_design(const std::string& text) {
  const auto designs = table1_designs();
  if (text.find(',') == std::string::npos) {
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(text, &used);
    } catch (const std::exception&) {
      throw UsageError("bad design '" + text + "'");
    }
    if (used != text.size() || id < 1 || id > static_cast<int>(designs.size())) {
      throw UsageError("design id must be 1.." + std::to_string(designs.size()));
    }
    return designs[static_cast<std::size_t>(id - 1)];
  }
  DesignConfig cfg;
  std::istringstream in(text);
  char c1 = 0, c2 = 0, c3 = 0;
  if (!(in >> cfg.n >> c1 >> cfg.p >> c2 >> cfg.s >> c3 >> cfg.snr) || c1 != ',' || c2 != ',' || c3 != ',' ||
      !in.eof()) {
    throw UsageError("design must be an id or n,p,s,snr");
  }
  return cfg;
}

SolverOptions solver_from(const std::string& name, double l1_radius) {
  SolverOptions opts;
  if (name == "ipm") {
    opts.method = SolverMethod::kInteriorPoint;
  } else if (name == "admm") {
    opts.method = SolverMethod::kAdmm;
  } else {
    throw UsageError("solver must be ipm or admm");
  }
  opts.l1_radius = l1_radius;
  return opts;
}

std::filesystem::path truth_path_for(const std::filesystem::path& data) {
  auto p = data;
  p.replace_extension();
  p += ".truth.csv";
  return p;
}

struct GenArgs {
  std::string design;
  std::optional<int> n, p, s;
  std::optional<double> snr;
  std::string censor = "gaussian";
  double censor_mean = 0.0, censor_sd = 2.0, censor_level = 0.0;
  std::uint64_t seed = 1;
  std::string out, truth;
};

int run_gen(const GenArgs& a) {
  DesignConfig cfg = a.design.empty() ? DesignConfig{} : parse_design(a.design);
  if (a.n) cfg.n = *a.n;
  if (a.p) cfg.p = *a.p;
  if (a.s) cfg.s = *a.s;
  if (a.snr) cfg.snr = *a.snr;
  if (a.censor == "constant") {
    cfg.censor_mode = CensorMode::kConstant;
    cfg.censor_constant = a.censor_level;
  } else if (a.censor == "gaussian") {
    cfg.censor_mean = a.censor_mean;
    cfg.censor_sd = a.censor_sd;
  } else {
    throw UsageError("censor must be gaussian or constant");
  }
  cfg.seed = a.seed;
  const auto [data, truth] = generate_design(cfg);
  const std::filesystem::path truth_path = a.truth.empty() ? truth_path_for(a.out) : std::filesystem::path(a.truth);
  write_dataset(a.out, data);
  write_truth(truth_path, truth);
  std::cout << "wrote " << a.out << " (n=" << data.n() << ", p=" << data.p()
            << ", censored=" << censored_fraction(data) << ") and " << truth_path.string() << '\n';
  return 0;
}

struct FitArgs {
  std::string data, estimator = "cl", solver = "ipm", out;
  std::optional<double> lambda;
  bool lambda_auto = false;
  double l1_radius = 1e6;
};

int run_fit(const FitArgs& a) {
  const Dataset data = read_dataset(a.data);
  FitConfig cfg;
  cfg.solver = solver_from(a.solver, a.l1_radius);
  std::string lambda_note;
  if (a.estimator == "powell") {
    if (a.lambda || a.lambda_auto) throw UsageError("powell takes no lambda");
  } else if (a.lambda_auto) {
    cfg.lambda = simulation_lambda(static_cast<int>(data.n()), static_cast<int>(data.p()));
    lambda_note = " rule=" + std::string(kLambdaRule);
  } else if (a.lambda) {
    cfg.lambda = *a.lambda;
  } else {
    throw UsageError("one of --lambda or --lambda-auto is required");
  }

  FitResult fit;
  if (a.estimator == "cl") {
    fit = fit_cl(data, cfg);
  } else if (a.estimator == "nl") {
    fit = fit_nl(data, cfg);
  } else if (a.estimator == "rl") {
    fit = fit_rl(data, cfg);
  } else if (a.estimator == "powell") {
    fit = fit_powell(data, cfg.solver);
  } else {
    throw UsageError("method must be cl, nl, rl or powell");
  }
  const double objective = censored_objective(fit.beta_hat, data, cfg.lambda);
  const auto nonzero = support(fit.beta_hat).size();
  std::ostringstream comment;
  comment << "method=" << a.estimator << " lambda=" << format_double(cfg.lambda) << lambda_note
          << " censored_objective=" << format_double(objective) << " converged=" << (fit.converged ? 1 : 0)
          << " iterations=" << fit.iterations << " restarts=" << fit.restarts_used;
  if (!a.out.empty()) write_coefficients(a.out, fit.beta_hat, comment.str());
  std::cout << "# " << comment.str() << " nonzero=" << nonzero << '\n';
  if (a.out.empty()) {
    std::cout << "j,beta_hat\n";
    for (Eigen::Index j = 0; j < fit.beta_hat.size(); ++j) std::cout << (j + 1) << ',' << format_double(fit.beta_hat[j]) << '\n';
  }
  return fit.converged ? 0 : kExitNoConvergence;
}

struct TheoryArgs {
  std::string design = "6";
  double t = 2.0, M = 1.0, K0 = 5.0;
  std::uint64_t seed = 1;
  int n_dirs = 200, reps = 50;
  long n_mc = 100000;
  std::string out;
};

int run_theory(const TheoryArgs& a) {
  DesignConfig cfg = parse_design(a.design);
  cfg.seed = a.seed;
  if (!(a.t > 0.0) || !(a.M > 0.0) || !(a.K0 > 0.0) || a.n_dirs < 1 || a.reps < 1 || a.n_mc < 1) {
    throw UsageError("t, M, K0, n-dirs, reps and n-mc must be positive");
  }
  const auto [data, truth] = generate_design(cfg);

  struct Row {
    std::string quantity;
    double value;
    std::string flag;
  };
  std::vector<Row> rows;
  const double K_X = data.X().cwiseAbs().maxCoeff();
  rows.push_back({"K_X", K_X, "empirical_max_abs_x"});
  const double lam = lambda_t(K_X, cfg.p, cfg.n, a.t);
  rows.push_back({"lambda_t", lam, "empirical_K_X"});
  rows.push_back({"lambda_simulation", simulation_lambda(cfg.n, cfg.p), std::string(kLambdaRule)});

  const MarginConstants margin = margin_constant(truth.sigma, a.K0);
  rows.push_back({"K0", a.K0, ""});
  rows.push_back({"sigma", truth.sigma, "realized_noise_scale"});
  rows.push_back({"Lambda_sq", margin.Lambda_sq, ""});
  rows.push_back({"L", margin.L, ""});
  rows.push_back({"eps0", margin.eps0, margin.eps0_exceeds_K0 ? "warning_eps0_ge_K0" : ""});
  rows.push_back({"alpha_eps", margin.alpha_eps, ""});
  rows.push_back({"C1_sq", margin.C1_sq, margin.eps0_exceeds_K0 ? "warning_eps0_ge_K0" : ""});

  const auto c2 = censoring_constant_check(truth, cfg, a.n_dirs, a.n_mc, a.seed);
  rows.push_back({"C2", c2.C2_hat, "mc_min_ratio_upper_estimate"});
  rows.push_back({"C2_std_error", c2.std_error, ""});

  // Rows of X are i.i.d. N(0, I): the population compatibility constant uses Sigma = I.
  const auto phi = compatibility_constant(Matrix::Identity(cfg.p, cfg.p), truth.active_set);
  rows.push_back({"phi0_sq", phi.value, phi.exact ? "population_sigma_exact" : "population_sigma_upper_bound"});

  const double C = 1.0 / (std::sqrt(margin.C1_sq) * c2.C2_hat);
  rows.push_back({"C", C, ""});
  const auto bounds = oracle_bounds(lam, cfg.s, C, phi.value);
  rows.push_back({"oracle_excess_bound", bounds.excess, "lambda_t"});
  rows.push_back({"oracle_l1_bound", bounds.l1, "lambda_t"});

  const auto conc = concentration_mc(truth, cfg, a.M, a.t, 50, a.reps, a.seed);
  rows.push_back({"concentration_exceedance_freq", conc.exceedance_freq, "lower_approximation_of_Z_M"});
  rows.push_back({"concentration_bound", std::exp(-a.t), "exp(-t)"});

  std::ostringstream csv;
  csv << "quantity,value,flag\n";
  for (const auto& r : rows) csv << r.quantity << ',' << format_double(r.value) << ',' << r.flag << '\n';
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(a.out, std::ios::binary);
    out << csv.str();
    if (!out.flush()) throw Error(ErrorCode::kIo, "write failed: " + a.out);
    std::cout << "wrote " << a.out << '\n';
  }
  return 0;
}

struct Table1Args {
  int reps = 30;
  std::uint64_t seed = 1;
  std::string out = "table1_out";
  int threads = 0;
  std::optional<double> lambda;
  std::string solver = "ipm";
};

int run_table1_cmd(const Table1Args& a) {
  if (a.reps < 2) throw UsageError("--reps must be >= 2");
  ExperimentOptions opts;
  opts.lambda = a.lambda;
  opts.solver = solver_from(a.solver, 1e6);
  opts.threads = a.threads;
  const StudyResult result = run_table1(a.reps, a.seed, opts);
  ReportMeta meta;
  meta.base_seed = a.seed;
  meta.n_reps = a.reps;
  meta.options = opts;
  for (const auto& path : emit_report(result, meta, a.out)) std::cout << "wrote " << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Censored l1-penalised LAD regression: simulation, fitting and theory constants"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Simulate a dataset and its ground truth");
  gen_cmd->add_option("--design", gen.design, "Reference design id (1-24) or n,p,s,snr (default 70,100,5,8)");
  gen_cmd->add_option("--n", gen.n, "Observations (overrides --design)");
  gen_cmd->add_option("--p", gen.p, "Dimension (overrides --design)");
  gen_cmd->add_option("--s", gen.s, "Sparsity (overrides --design)");
  gen_cmd->add_option("--snr", gen.snr, "Signal-to-noise ratio (overrides --design)");
  gen_cmd->add_option("--censor", gen.censor, "gaussian or constant")->capture_default_str();
  gen_cmd->add_option("--censor-mean", gen.censor_mean)->capture_default_str();
  gen_cmd->add_option("--censor-sd", gen.censor_sd)->capture_default_str();
  gen_cmd->add_option("--censor-level", gen.censor_level, "Level for constant censoring")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Dataset CSV (y,c,x1..xp)")->required();
  gen_cmd->add_option("--truth", gen.truth, "Truth CSV (default: <out without extension>.truth.csv)");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit an estimator to a dataset CSV");
  fit_cmd->add_option("--data", fit.data, "Dataset CSV")->required();
  fit_cmd->add_option("--method,--estimator", fit.estimator, "cl, nl, rl or powell")->capture_default_str();
  auto* lambda_opt = fit_cmd->add_option("--lambda", fit.lambda, "Penalty level");
  fit_cmd->add_flag("--lambda-auto", fit.lambda_auto, "Use the simulation rule " + std::string(kLambdaRule))
      ->excludes(lambda_opt);
  fit_cmd->add_option("--solver", fit.solver, "ipm or admm")->capture_default_str();
  fit_cmd->add_option("--l1-radius", fit.l1_radius, "Feasible set ||beta||_1 <= R")->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "Coefficient CSV (default: stdout)");

  TheoryArgs th;
  auto* th_cmd = app.add_subcommand("theory", "Theory constants for a design");
  th_cmd->add_option("--design", th.design, "Reference design id (1-24) or n,p,s,snr")->capture_default_str();
  th_cmd->add_option("--t", th.t)->capture_default_str();
  th_cmd->add_option("--M", th.M)->capture_default_str();
  th_cmd->add_option("--K0", th.K0)->capture_default_str();
  th_cmd->add_option("--seed", th.seed)->capture_default_str();
  th_cmd->add_option("--n-dirs", th.n_dirs, "Cone directions for the censoring constant")->capture_default_str();
  th_cmd->add_option("--n-mc", th.n_mc, "Population sample size")->capture_default_str();
  th_cmd->add_option("--reps", th.reps, "Replicates for the concentration check")->capture_default_str();
  th_cmd->add_option("--out", th.out, "CSV quantity,value,flag (default: stdout)");

  Table1Args t1;
  auto* t1_cmd = app.add_subcommand("table1", "Run the 24-design simulation study");
  t1_cmd->add_option("--reps", t1.reps)->capture_default_str();
  t1_cmd->add_option("--seed", t1.seed)->capture_default_str();
  t1_cmd->add_option("--out", t1.out)->capture_default_str();
  t1_cmd->add_option("--threads", t1.threads, "0 = all cores")->capture_default_str();
  t1_cmd->add_option("--lambda", t1.lambda, "Fixed penalty instead of the rule");
  t1_cmd->add_option("--solver", t1.solver, "ipm or admm")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gen);
    if (fit_cmd->parsed()) return run_fit(fit);
    if (th_cmd->parsed()) return run_theory(th);
    if (t1_cmd->parsed()) return run_table1_cmd(t1);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kInvalidArgument ? kExitUsage : kExitData;
  }
  return kExitUsage;
}
