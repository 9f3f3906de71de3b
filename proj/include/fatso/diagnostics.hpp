#pragma once

#include <Eigen/Dense>

#include "fatso/dataset.hpp"

namespace fatso {

/// Gaussian summary of the likelihood: MLE `mu` and covariance
/// (X^T X)^{-1} sigma^2, on the standardized coefficient scale.
struct LikelihoodSummary {
  Eigen::VectorXd mu;
  Eigen::MatrixXd covariance;
  double sigma2 = 0.0;
};

/// Pairwise conditional signal ratios r[i][j] = |E(b_i | b_j = 0) / E(b_j | b_i = 0)|.
/// Entries are +inf when the denominator vanishes.
struct SignalRatioReport {
  Eigen::MatrixXd r;
  Eigen::VectorXd mu;
};

/// Requires n >= p and a full-rank design; throws DataError otherwise.
LikelihoodSummary likelihood_summary(const StandardizedProblem& sp, double sigma2);

/// Residual variance of the least-squares fit, RSS / (n - p - 1). Needs
/// n > p + 1. A heuristic default when the noise variance is unknown.
double residual_variance(const StandardizedProblem& sp);

/// mu_i - cov_ij mu_j / cov_jj: the mean of b_i given b_j = 0.
double conditional_expectation(const LikelihoodSummary& ls, Eigen::Index i, Eigen::Index j);

double r_ij(const LikelihoodSummary& ls, Eigen::Index i, Eigen::Index j);

SignalRatioReport r_matrix(const LikelihoodSummary& ls);

}  // namespace fatso
