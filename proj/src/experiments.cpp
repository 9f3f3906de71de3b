#include "fatso/experiments.hpp"

#include <charconv>
#include <cmath>
#include <future>
#include <sstream>

#include "fatso/errors.hpp"
#include "fatso/rng.hpp"

#ifndef FATSO_DATA_DIR
#define FATSO_DATA_DIR "data"
#endif

namespace fatso {

void SimSpec::validate() const {
  if (n < 1 || p < 1) throw ParameterError("simulation needs n >= 1 and p >= 1");
  if (static_cast<int>(true_beta.size()) != p) {
    throw ParameterError("true beta has " + std::to_string(true_beta.size()) +
                         " entries, expected p = " + std::to_string(p));
  }
  if (!std::isfinite(noise_sd) || !(noise_sd > 0.0)) {
    throw ParameterError("noise standard deviation must be positive");
  }
}

Dataset simulate_linear(const SimSpec& spec) {
  spec.validate();
  Dataset d;
  d.design.resize(spec.n, spec.p);
  Rng design_rng(spec.design_seed);
  // Row-major draw order so that adding rows extends rather than reshuffles.
  for (int i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.p; ++j) d.design(i, j) = design_rng.gaussian();
  }
  const Eigen::Map<const Eigen::VectorXd> beta(spec.true_beta.data(), spec.p);
  Rng noise_rng(spec.noise_seed);
  d.response = d.design * beta;
  for (int i = 0; i < spec.n; ++i) d.response(i) += spec.noise_sd * noise_rng.gaussian();
  for (int j = 0; j < spec.p; ++j) d.column_names.push_back("x" + std::to_string(j + 1));
  d.response_name = "y";
  return d;
}

void SweepSpec::validate() const {
  if (m_grid.empty() || lambda_grid.empty()) throw ParameterError("sweep grids must be nonempty");
  for (double m : m_grid) {
    if (!(m > 1.0)) throw ParameterError("m must exceed 1");
  }
  for (double l : lambda_grid) {
    if (!(l > 0.0)) throw ParameterError("lambda must be positive");
  }
  fit_config.validate();
}

double evaluate_mse(const FitResult& model, const Dataset& test) {
  if (test.cols() != model.beta_raw.size()) {
    throw DataError("test data has " + std::to_string(test.cols()) + " columns, model has " +
                    std::to_string(model.beta_raw.size()));
  }
  if (test.rows() < 1) throw DataError("test data is empty");
  const Eigen::VectorXd pred = predict(test.design, {model.beta_raw, model.intercept});
  return (test.response - pred).squaredNorm() / static_cast<double>(test.rows());
}

std::vector<SweepRow> sweep_cells(const Dataset& data, const std::vector<GridCell>& cells,
                                  const FitConfig& cfg, const std::optional<SplitSpec>& split,
                                  const std::optional<double>& sigma2) {
  cfg.validate();
  Dataset train = data;
  std::optional<Dataset> test;
  if (split) {
    auto parts = fatso::split(data, *split);
    train = std::move(parts.first);
    test = std::move(parts.second);
  }
  const auto problem = std::make_shared<const StandardizedProblem>(standardize(train));
  const double noise_variance = sigma2.value_or(1.0);

  auto run_cell = [&](const GridCell& cell) {
    SweepRow row;
    row.m = cell.m;
    row.lambda = cell.lambda;
    row.reference = cell.reference;
    try {
      const auto sel = Selectivity::from_m(cell.m);
      row.rho = sel.rho();
      const auto obj =
          Objective::fatso(problem, sel, ShrinkageSpec::direct(cell.lambda), noise_variance);
      const FitResult res = fit(obj, cfg);
      row.beta_hat = res.beta_raw;
      row.active_set = res.active_set;
      row.converged = res.converged;
      if (test) row.prediction_mse = evaluate_mse(res, *test);
    } catch (const Error& e) {
      row.error = e.what();
    }
    return row;
  };

  // Cells are independent; results are placed by index so the output does
  // not depend on scheduling.
  std::vector<std::future<SweepRow>> pending;
  pending.reserve(cells.size());
  for (const auto& cell : cells) pending.push_back(std::async(std::launch::async, run_cell, cell));
  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (auto& f : pending) rows.push_back(f.get());
  return rows;
}

std::vector<SweepRow> sweep(const Dataset& data, const SweepSpec& spec,
                            const std::optional<SplitSpec>& split,
                            const std::optional<double>& sigma2) {
  spec.validate();
  std::vector<GridCell> cells;
  for (double m : spec.m_grid) {
    for (double l : spec.lambda_grid) cells.push_back({m, l, {}});
  }
  return sweep_cells(data, cells, spec.fit_config, split, sigma2);
}

CvResult cross_validate_lambda(const Dataset& data, double m,
                               const std::vector<double>& lambda_grid, int folds,
                               std::uint64_t seed, const FitConfig& cfg,
                               const std::optional<double>& sigma2) {
  if (lambda_grid.empty()) throw ParameterError("lambda grid must be nonempty");
  if (folds < 2) throw ParameterError("cross-validation needs at least 2 folds");
  const auto n = static_cast<std::size_t>(data.rows());
  if (n < static_cast<std::size_t>(folds)) {
    throw DataError("cross-validation needs at least as many rows as folds");
  }
  const auto sel = Selectivity::from_m(m);
  for (double l : lambda_grid) {
    if (!(l > 0.0)) throw ParameterError("lambda must be positive");
  }

  Rng rng(seed);
  const auto perm = rng.permutation(n);
  const auto k = static_cast<std::size_t>(folds);

  std::vector<double> total(lambda_grid.size(), 0.0);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t begin = f * n / k;
    const std::size_t end = (f + 1) * n / k;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < n; ++i) {
      (i >= begin && i < end ? test_rows : train_rows).push_back(perm[i]);
    }
    const Dataset train = data.select_rows(train_rows);
    const Dataset test = data.select_rows(test_rows);
    const auto problem = std::make_shared<const StandardizedProblem>(standardize(train));
    for (std::size_t li = 0; li < lambda_grid.size(); ++li) {
      const auto obj = Objective::fatso(problem, sel, ShrinkageSpec::direct(lambda_grid[li]),
                                        sigma2.value_or(1.0));
      total[li] += evaluate_mse(fit(obj, cfg), test);
    }
  }

  CvResult out;
  double best_mse = 0.0;
  for (std::size_t li = 0; li < lambda_grid.size(); ++li) {
    const double mean = total[li] / static_cast<double>(k);
    out.table.emplace_back(lambda_grid[li], mean);
    const bool better = li == 0 || mean < best_mse ||
                        (mean == best_mse && lambda_grid[li] > out.best_lambda);
    if (better) {
      best_mse = mean;
      out.best_lambda = lambda_grid[li];
    }
  }
  return out;
}

SimSpec table1_sim_spec(std::uint64_t seed) {
  SimSpec spec;
  spec.n = 15;
  spec.p = 20;
  spec.true_beta.assign(20, 0.0);
  spec.true_beta[0] = 0.9;
  spec.true_beta[1] = 0.5;
  spec.true_beta[2] = 0.7;
  spec.noise_sd = 0.1;
  spec.design_seed = seed;
  spec.noise_seed = seed + 1000003;
  return spec;
}

SimSpec seventeen_active_sim_spec(std::uint64_t seed) {
  SimSpec spec = table1_sim_spec(seed);
  // Nonzero magnitudes drawn from [0.3, 1.0) with the design seed offset.
  Rng coef_rng(seed + 2000003);
  for (int j = 0; j < spec.p; ++j) {
    const bool zero = j == 0 || j == 10 || j == 18;
    const double draw = 0.3 + 0.7 * coef_rng.uniform();
    spec.true_beta[static_cast<std::size_t>(j)] = zero ? 0.0 : draw;
  }
  return spec;
}

std::vector<GridCell> table1_cells() {
  return {
      {500, 0.1, "b1=0.697 b2=0.329 b3=0.543; many others of similar order"},
      {30, 30, "b1=0.709 b2=0.336 b3=0.548; b6 b7 b12 b16 b20 also active"},
      {3, 30, "b1=0.814 b2=0.397 b3=0.602; b7 b17 active"},
      {2, 30, "b1=0.871 b2=0.464 b3=0.671; others inactive"},
      {2, 0.01, "b1=0.857 b2=0.442 b3=0.65; b17 active"},
      {2, 1, "b1=0.868 b2=0.459 b3=0.69; others inactive"},
      {2, 100, "b1=0.868 b2=0.46 b3=0.658; others inactive"},
      {2, 1000, "b1=0.71 b2=0.249 b3=0.437; others inactive"},
  };
}

std::vector<GridCell> table2_cells() {
  return {
      {100, 0.0001, "all except b8; MSE 0.60516"},
      {5, 0.5, "all except b8; MSE 0.61363"},
      {3, 1, "b1 b2 b4 b5 b6 b7; MSE 0.63189"},
      {2, 1, "b1 b2 b4 b5 b6 b7; MSE 0.65002"},
      {1.2, 1, "b1 b3 b6; MSE 0.78280"},
  };
}

std::vector<SweepRow> table1_experiment(std::uint64_t seed) {
  const Dataset data = simulate_linear(table1_sim_spec(seed));
  return sweep_cells(data, table1_cells(), FitConfig{});
}

FitResult seventeen_active_fit(std::uint64_t seed, double m, double lambda) {
  const Dataset data = simulate_linear(seventeen_active_sim_spec(seed));
  const auto problem = std::make_shared<const StandardizedProblem>(standardize(data));
  return fit(Objective::fatso(problem, Selectivity::from_m(m), ShrinkageSpec::direct(lambda)));
}

std::filesystem::path default_prostate_path() {
  return std::filesystem::path(FATSO_DATA_DIR) / "prostate.csv";
}

std::vector<SweepRow> table2_experiment(std::uint64_t seed, const std::filesystem::path& fixture) {
  if (!std::filesystem::exists(fixture)) {
    throw DataError("prostate fixture not found at '" + fixture.string() + "'");
  }
  const Dataset data = load_csv(fixture, "lpsa");
  return sweep_cells(data, table2_cells(), FitConfig{}, SplitSpec{67, seed}, std::nullopt);
}

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string sweep_to_tsv(const std::vector<SweepRow>& rows, bool with_reference) {
  std::ostringstream out;
  out << "m\trho\tlambda\tactive_set\tbeta_hat\tprediction_mse\tconverged";
  if (with_reference) out << "\treference";
  out << '\n';
  for (const auto& row : rows) {
    out << format_real(row.m) << '\t' << format_real(row.rho) << '\t' << format_real(row.lambda)
        << '\t';
    for (std::size_t i = 0; i < row.active_set.size(); ++i) {
      out << (i ? "," : "") << row.active_set[i] + 1;
    }
    out << '\t';
    for (Eigen::Index i = 0; i < row.beta_hat.size(); ++i) {
      out << (i ? "," : "") << format_real(row.beta_hat(i));
    }
    out << '\t';
    if (row.prediction_mse) out << format_real(*row.prediction_mse);
    out << '\t' << (row.error.empty() ? (row.converged ? "yes" : "no") : "error: " + row.error);
    if (with_reference) out << '\t' << row.reference;
    out << '\n';
  }
  return out.str();
}

}  // namespace fatso
