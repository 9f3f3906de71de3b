#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fatso/dataset.hpp"
#include "fatso/solver.hpp"

namespace fatso {

/// Linear model y = X beta + eps with X i.i.d. standard Gaussian entries and
/// eps i.i.d. N(0, noise_sd^2). Columns are named x1..xp, the response y.
struct SimSpec {
  int n = 0;
  int p = 0;
  std::vector<double> true_beta;
  double noise_sd = 0.0;
  std::uint64_t design_seed = 0;
  std::uint64_t noise_seed = 0;

  void validate() const;
};

Dataset simulate_linear(const SimSpec& spec);

struct SweepSpec {
  std::vector<double> m_grid;
  std::vector<double> lambda_grid;
  FitConfig fit_config;

  void validate() const;
};

struct SweepRow {
  double m = 0.0;
  double rho = 0.0;
  double lambda = 0.0;
  Eigen::VectorXd beta_hat;  // raw scale
  std::vector<std::size_t> active_set;  // 0-based
  std::optional<double> prediction_mse;
  bool converged = false;
  std::string error;      // non-empty when the fit threw
  std::string reference;  // reference values for the same cell, display only
};

/// A single (m, lambda) cell.
struct GridCell {
  double m = 0.0;
  double lambda = 0.0;
  std::string reference;
};

/// One row per (m, lambda) in the Cartesian product, m outermost. With a
/// split the model is fit on the training rows and prediction MSE is
/// reported on the test rows (raw response scale). `sigma2` is the
/// likelihood noise variance (1 when absent).
std::vector<SweepRow> sweep(const Dataset& data, const SweepSpec& spec,
                            const std::optional<SplitSpec>& split = std::nullopt,
                            const std::optional<double>& sigma2 = std::nullopt);

/// Same as sweep() over an explicit list of cells.
std::vector<SweepRow> sweep_cells(const Dataset& data, const std::vector<GridCell>& cells,
                                  const FitConfig& cfg,
                                  const std::optional<SplitSpec>& split = std::nullopt,
                                  const std::optional<double>& sigma2 = std::nullopt);

/// Mean squared raw-scale prediction error on `test`.
double evaluate_mse(const FitResult& model, const Dataset& test);

struct CvResult {
  double best_lambda = 0.0;
  std::vector<std::pair<double, double>> table;  // (lambda, mean held-out MSE)
};

/// K-fold cross-validation over lambda for FATSO with selectivity m. Folds
/// are contiguous blocks of a seeded row permutation; ties go to the larger
/// lambda.
CvResult cross_validate_lambda(const Dataset& data, double m,
                               const std::vector<double>& lambda_grid, int folds,
                               std::uint64_t seed, const FitConfig& cfg = {},
                               const std::optional<double>& sigma2 = std::nullopt);

/// Seeds for which the qualitative checks were confirmed.
inline constexpr std::uint64_t kTable1Seed = 592;
inline constexpr std::uint64_t kTable2Seed = 7;
inline constexpr std::uint64_t kSeventeenActiveSeed = 91;

/// 15 observations, 20 covariates, beta_1..3 = 0.9, 0.5, 0.7, noise sd 0.1.
SimSpec table1_sim_spec(std::uint64_t seed);

/// Same design size with 17 nonzero coefficients; beta_1, beta_11 and
/// beta_19 are zero.
SimSpec seventeen_active_sim_spec(std::uint64_t seed);

std::vector<GridCell> table1_cells();
std::vector<GridCell> table2_cells();

std::vector<SweepRow> table1_experiment(std::uint64_t seed = kTable1Seed);

/// FATSO fit on the 17-active simulation (unit-variance likelihood).
FitResult seventeen_active_fit(std::uint64_t seed, double m, double lambda);

/// Prostate fixture location baked in at build time.
std::filesystem::path default_prostate_path();

/// 67/30 split of the prostate data (response lpsa) through the five-row
/// grid. Throws DataError when the fixture is missing.
std::vector<SweepRow> table2_experiment(std::uint64_t seed = kTable2Seed,
                                        const std::filesystem::path& fixture =
                                            default_prostate_path());

/// Tab-separated table: m, rho, lambda, active_set (1-based, comma-joined),
/// beta_hat (comma-joined), prediction_mse (empty if absent), converged,
/// and a trailing reference column when requested.
std::string sweep_to_tsv(const std::vector<SweepRow>& rows, bool with_reference = false);

/// Shortest round-trip decimal form.
std::string format_real(double x);

}  // namespace fatso
