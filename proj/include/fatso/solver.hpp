#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fatso/dataset.hpp"
#include "fatso/operator.hpp"

namespace fatso {

enum class PenaltyKind { fatso, lasso };

/// Negative log-posterior on a standardized problem.
///
/// Direct lambda:  ||y - X beta||^2 / (2 sigma^2) + lambda * pen(beta), with
///                 sigma^2 the noise variance (1 unless given).
/// k / sigma^2:    0.5 * ||y - X beta||^2 + k * pen(beta), the sigma-free
///                 form of the same posterior.
/// pen is sum (|beta_i| + alpha)^2 for FATSO and sum |beta_i| for LASSO.
/// Both are scale() * (0.5 * ||y - X beta||^2 + weight() * pen(beta)).
class Objective {
 public:
  static Objective fatso(std::shared_ptr<const StandardizedProblem> problem, Selectivity sel,
                         ShrinkageSpec shrink, double noise_variance = 1.0);
  static Objective lasso(std::shared_ptr<const StandardizedProblem> problem, ShrinkageSpec shrink,
                         double noise_variance = 1.0);

  PenaltyKind kind() const { return kind_; }
  const std::optional<Selectivity>& selectivity() const { return sel_; }
  const ShrinkageSpec& shrinkage() const { return shrink_; }
  const StandardizedProblem& problem() const { return *problem_; }
  const std::shared_ptr<const StandardizedProblem>& problem_ptr() const { return problem_; }
  /// Likelihood noise variance; ignored in k / sigma^2 mode.
  double noise_variance() const { return noise_variance_; }
  /// Penalty weight against 0.5 * ||y - X beta||^2.
  double weight() const;
  /// Factor turning the least-squares form into the reported objective.
  double scale() const;
  Eigen::Index dimension() const { return problem_->cols(); }

  double value(const Eigen::VectorXd& beta) const;
  /// weight() * pen(beta), before scale().
  double penalty_term(const Eigen::VectorXd& beta) const;
  /// Per-coordinate subdifferential of the whole objective.
  std::vector<Interval> subdifferential(const Eigen::VectorXd& beta) const;

 private:
  Objective(PenaltyKind kind, std::shared_ptr<const StandardizedProblem> problem,
            std::optional<Selectivity> sel, ShrinkageSpec shrink, double noise_variance);

  PenaltyKind kind_;
  std::shared_ptr<const StandardizedProblem> problem_;
  std::optional<Selectivity> sel_;
  ShrinkageSpec shrink_;
  double noise_variance_;
};

struct FitConfig {
  int max_sweeps = 10000;
  double objective_tol = 1e-10;
  double coordinate_tol = 1e-12;
  // Reporting only; exact zeros come from the solver.
  double active_threshold = 0.0;

  void validate() const;
};

struct FitResult {
  Eigen::VectorXd beta_std;
  Eigen::VectorXd beta_raw;
  double intercept = 0.0;
  std::vector<std::size_t> active_set;  // 0-based, ascending
  double objective_value = 0.0;
  int sweeps_used = 0;
  double optimality_residual = 0.0;
  bool converged = false;
  // Objective after each sweep, starting with the value at beta = 0.
  std::vector<double> objective_trace;
};

/// Residual tolerance a converged fit must meet.
inline double residual_tolerance(double objective_value) {
  return 1e-6 * (1.0 + std::abs(objective_value));
}

/// Cyclic coordinate descent from beta = 0. Every 1-D subproblem is solved
/// exactly for LASSO (soft threshold) and by bisection on the 1-D
/// derivative for FATSO, after testing whether 0 lies in the 1-D
/// subdifferential at zero. On failure to converge within max_sweeps the
/// best point is returned with converged = false.
FitResult fit(const Objective& obj, const FitConfig& cfg = {});

/// Euclidean distance from 0 to the objective's subdifferential at beta.
double optimality_check(const Objective& obj, const Eigen::VectorXd& beta);

struct OracleResult {
  Eigen::VectorXd beta;
  double value = 0.0;
};

/// Exhaustive grid search over [-bounds, bounds]^p (p <= 3) followed by a
/// derivative-free coordinate polish. Uses objective values only.
OracleResult brute_force_oracle(const Objective& obj, double bounds, int grid_points);

/// Derivative-free coordinate polish from `start` (golden-section line
/// searches with bracket expansion).
OracleResult polish(const Objective& obj, const Eigen::VectorXd& start, double initial_width);

/// For a two-covariate problem, the LASSO shrinkage nu above which at most
/// one coefficient is nonzero, located by bisection to 1e-8 relative width.
double lasso_selection_threshold(const StandardizedProblem& problem);

}  // namespace fatso
