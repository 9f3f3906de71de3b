#include "fatso/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "fatso/dataset.hpp"
#include "fatso/diagnostics.hpp"
#include "fatso/errors.hpp"
#include "fatso/experiments.hpp"
#include "fatso/operator.hpp"
#include "fatso/solver.hpp"

namespace fatso::cli {
namespace {

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string join_indices(const std::vector<std::size_t>& idx) {
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + std::to_string(idx[i] + 1);
  return s;
}

std::string join_reals(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_real(v(i));
  return s;
}

// Flag values shared by the subcommands.
struct Flags {
  std::string data;
  std::string response;
  std::optional<double> m;
  std::optional<double> rho;
  std::optional<double> lambda;
  std::optional<double> k;
  std::optional<double> sigma;
  std::optional<double> sigma2;
  std::string penalty = "fatso";
  std::optional<int> max_sweeps;
  std::vector<double> m_grid;
  std::vector<double> lambda_grid;
  std::optional<std::size_t> train;
  std::optional<std::uint64_t> seed;
  int folds = 5;
  int n = 0;
  int p = 0;
  std::vector<double> beta;
  double noise_sd = 0.0;
  std::string out_path;
  std::string config;
};

Selectivity selectivity_from(const Flags& f) {
  if (f.m) return Selectivity::from_m(*f.m);
  if (f.rho) return Selectivity::from_rho(*f.rho);
  throw ParameterError("one of --m or --rho is required");
}

ShrinkageSpec shrinkage_from(const Flags& f) {
  if (f.lambda) return ShrinkageSpec::direct(*f.lambda);
  if (f.k && f.sigma) return ShrinkageSpec::noise_scaled(*f.k, *f.sigma);
  if (f.k || f.sigma) throw ParameterError("--k and --sigma must be given together");
  throw ParameterError("one of --lambda or --k/--sigma is required");
}

std::string cmd_fit(const Flags& f) {
  const bool lasso = f.penalty == "lasso";
  std::optional<Selectivity> sel;
  if (!lasso) sel = selectivity_from(f);
  const auto shrink = shrinkage_from(f);
  FitConfig cfg;
  if (f.max_sweeps) cfg.max_sweeps = *f.max_sweeps;
  cfg.validate();
  const Dataset data = load_csv(f.data, f.response);
  const auto problem = std::make_shared<const StandardizedProblem>(standardize(data));
  const double noise = f.sigma2.value_or(1.0);
  const auto res = fit(lasso ? Objective::lasso(problem, shrink, noise)
                             : Objective::fatso(problem, *sel, shrink, noise),
                       cfg);
  if (!res.converged) {
    throw ConvergenceFailure("fit did not converge after " + std::to_string(res.sweeps_used) +
                             " sweeps (optimality residual " +
                             format_real(res.optimality_residual) + ")");
  }
  std::ostringstream out;
  out << "beta_raw\tintercept\tactive_set\tobjective\tbeta_std\tsweeps\toptimality_residual\n"
      << join_reals(res.beta_raw) << '\t' << format_real(res.intercept) << '\t'
      << join_indices(res.active_set) << '\t' << format_real(res.objective_value) << '\t'
      << join_reals(res.beta_std) << '\t' << res.sweeps_used << '\t'
      << format_real(res.optimality_residual) << '\n';
  return out.str();
}

std::string cmd_sweep(const Flags& f) {
  SweepSpec spec{f.m_grid, f.lambda_grid, FitConfig{}};
  spec.validate();
  const Dataset data = load_csv(f.data, f.response);
  std::optional<SplitSpec> split;
  if (f.train) split = SplitSpec{*f.train, f.seed.value_or(0)};
  return sweep_to_tsv(sweep(data, spec, split, f.sigma2));
}

std::string cmd_diagnose(const Flags& f, std::ostream& err) {
  const Dataset data = load_csv(f.data, f.response);
  const StandardizedProblem sp = standardize(data);
  double sigma2 = 0.0;
  if (f.sigma2) {
    sigma2 = *f.sigma2;
  } else {
    sigma2 = residual_variance(sp);
    err << "note: --sigma2 not given; using the least-squares residual variance "
        << format_real(sigma2) << '\n';
  }
  const auto report = r_matrix(likelihood_summary(sp, sigma2));
  std::ostringstream out;
  out << "variable\tmu";
  for (const auto& name : data.column_names) out << "\tr_" << name;
  out << '\n';
  for (Eigen::Index i = 0; i < report.r.rows(); ++i) {
    out << data.column_names[static_cast<std::size_t>(i)] << '\t' << format_real(report.mu(i));
    for (Eigen::Index j = 0; j < report.r.cols(); ++j) out << '\t' << format_real(report.r(i, j));
    out << '\n';
  }
  return out.str();
}

std::string cmd_simulate(const Flags& f) {
  if (f.p < 1 || f.n < 1) throw ParameterError("--n and --p must be positive");
  if (static_cast<int>(f.beta.size()) > f.p) {
    throw ParameterError("--beta has more entries than --p");
  }
  SimSpec spec;
  spec.n = f.n;
  spec.p = f.p;
  spec.true_beta = f.beta;
  spec.true_beta.resize(static_cast<std::size_t>(f.p), 0.0);
  spec.noise_sd = f.noise_sd;
  spec.design_seed = f.seed.value_or(0);
  spec.noise_seed = spec.design_seed + 1000003;
  return to_csv(simulate_linear(spec));
}

std::string cmd_cv(const Flags& f) {
  const auto sel = selectivity_from(f);
  const Dataset data = load_csv(f.data, f.response);
  const auto cv =
      cross_validate_lambda(data, sel.m(), f.lambda_grid, f.folds, f.seed.value_or(0), {}, f.sigma2);
  std::ostringstream out;
  out << "lambda\tmean_mse\tselected\n";
  for (const auto& [lambda, mse] : cv.table) {
    out << format_real(lambda) << '\t' << format_real(mse) << '\t'
        << (lambda == cv.best_lambda ? "yes" : "no") << '\n';
  }
  return out.str();
}

std::string cmd_table1(const Flags& f) {
  return sweep_to_tsv(table1_experiment(f.seed.value_or(kTable1Seed)), true);
}

std::string cmd_table2(const Flags& f) {
  const auto fixture = f.data.empty() ? default_prostate_path() : std::filesystem::path(f.data);
  return sweep_to_tsv(table2_experiment(f.seed.value_or(kTable2Seed), fixture), true);
}

// Appends config-file entries whose flag does not already appear on the
// command line, so explicit flags win.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") path = args[i + 1];
  }
  for (const auto& a : args) {
    if (a.rfind("--config=", 0) == 0) path = a.substr(9);
  }
  if (path.empty()) return args;
  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(0, a.find('=')));
  }
  auto merged = args;
  const auto extra = read_config(path);
  for (std::size_t i = 0; i + 1 < extra.size(); i += 2) {
    if (!given.count(extra[i])) {
      merged.push_back(extra[i]);
      merged.push_back(extra[i + 1]);
    }
  }
  return merged;
}

}  // namespace

std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("config line " + std::to_string(number) + " is not 'key = value'");
    }
    std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.rfind("--", 0) != 0) key = "--" + key;
    if (key == "--config") continue;
    out.push_back(key);
    out.push_back(value);
  }
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Penalized linear regression with the FATSO selection operator", "fatso"};
  app.require_subcommand(1);

  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", f.out_path, "Write results to PATH instead of standard output");
    sub->add_option("--config", f.config, "key = value file mirroring flag names");
  };
  auto add_data = [&](CLI::App* sub, bool required) {
    auto* d = sub->add_option("--data", f.data, "CSV file with a header row");
    auto* r = sub->add_option("--response", f.response, "Name of the response column");
    if (required) {
      d->required();
      r->required();
    }
  };
  auto add_selectivity = [&](CLI::App* sub) {
    auto* m = sub->add_option("--m", f.m, "Selectivity m (> 1)");
    auto* rho = sub->add_option("--rho", f.rho, "Geometry ratio rho (> 1)");
    m->excludes(rho);
  };

  auto* fit_cmd = app.add_subcommand("fit", "Fit one FATSO model");
  add_data(fit_cmd, true);
  add_selectivity(fit_cmd);
  auto* lambda = fit_cmd->add_option("--lambda", f.lambda, "Shrinkage lambda");
  auto* k = fit_cmd->add_option("--k", f.k, "Shrinkage k (with --sigma, lambda = k / sigma^2)");
  fit_cmd->add_option("--sigma", f.sigma, "Noise standard deviation for --k");
  fit_cmd->add_option("--sigma2", f.sigma2, "Likelihood noise variance for --lambda (default 1)");
  fit_cmd->add_option("--penalty", f.penalty, "fatso (default) or lasso")
      ->check(CLI::IsMember({"fatso", "lasso"}));
  fit_cmd->add_option("--max-sweeps", f.max_sweeps, "Coordinate-descent sweep limit (default 10000)");
  lambda->excludes(k);
  add_out(fit_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "Fit over an m x lambda grid");
  add_data(sweep_cmd, true);
  sweep_cmd->add_option("--m-grid", f.m_grid, "Comma-separated m values")->delimiter(',')->required();
  sweep_cmd->add_option("--lambda-grid", f.lambda_grid, "Comma-separated lambda values")
      ->delimiter(',')
      ->required();
  sweep_cmd->add_option("--train", f.train, "Training rows; the rest are used for prediction MSE");
  sweep_cmd->add_option("--seed", f.seed, "Permutation seed for --train");
  sweep_cmd->add_option("--sigma2", f.sigma2, "Likelihood noise variance (default 1)");
  add_out(sweep_cmd);

  auto* diag_cmd = app.add_subcommand("diagnose", "Likelihood summary and signal ratios r_ij");
  add_data(diag_cmd, true);
  diag_cmd->add_option("--sigma2", f.sigma2, "Noise variance (default: residual variance)");
  add_out(diag_cmd);

  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a Gaussian linear model as CSV");
  sim_cmd->add_option("--n", f.n, "Rows")->required();
  sim_cmd->add_option("--p", f.p, "Covariates")->required();
  sim_cmd->add_option("--beta", f.beta, "Leading true coefficients; the rest are 0")
      ->delimiter(',')
      ->required();
  sim_cmd->add_option("--noise-sd", f.noise_sd, "Noise standard deviation")->required();
  sim_cmd->add_option("--seed", f.seed, "Random seed");
  add_out(sim_cmd);

  auto* cv_cmd = app.add_subcommand("cv", "Cross-validate lambda for a fixed m");
  add_data(cv_cmd, true);
  add_selectivity(cv_cmd);
  cv_cmd->add_option("--lambda-grid", f.lambda_grid, "Comma-separated lambda values")
      ->delimiter(',')
      ->required();
  cv_cmd->add_option("--folds", f.folds, "Number of folds (default 5)");
  cv_cmd->add_option("--seed", f.seed, "Fold permutation seed");
  cv_cmd->add_option("--sigma2", f.sigma2, "Likelihood noise variance (default 1)");
  add_out(cv_cmd);

  auto* t1_cmd = app.add_subcommand("table1", "Simulated 20-covariate study");
  t1_cmd->add_option("--seed", f.seed, "Simulation seed");
  add_out(t1_cmd);

  auto* t2_cmd = app.add_subcommand("table2", "Prostate 67/30 study");
  t2_cmd->add_option("--seed", f.seed, "Permutation seed");
  t2_cmd->add_option("--data", f.data, "Prostate CSV (default: bundled fixture)");
  add_out(t2_cmd);

  std::vector<std::string> args;
  try {
    args = merge_config(raw_args);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  std::string result;
  try {
    if (fit_cmd->parsed()) {
      result = cmd_fit(f);
    } else if (sweep_cmd->parsed()) {
      result = cmd_sweep(f);
    } else if (diag_cmd->parsed()) {
      result = cmd_diagnose(f, err);
    } else if (sim_cmd->parsed()) {
      result = cmd_simulate(f);
    } else if (cv_cmd->parsed()) {
      result = cmd_cv(f);
    } else if (t1_cmd->parsed()) {
      result = cmd_table1(f);
    } else if (t2_cmd->parsed()) {
      result = cmd_table2(f);
    }
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConvergenceFailure& e) {
    err << "error: " << e.what() << '\n';
    return kConvergenceFailure;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kConvergenceFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }

  if (f.out_path.empty()) {
    out << result;
  } else {
    std::ofstream file(f.out_path, std::ios::binary);
    if (!file || !(file << result)) {
      err << "error: cannot write '" << f.out_path << "'\n";
      return kDataError;
    }
  }
  return kSuccess;
}

}  // namespace fatso::cli
