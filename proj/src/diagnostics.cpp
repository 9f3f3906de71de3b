#include "fatso/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fatso/errors.hpp"

namespace fatso {
namespace {

void check_pair(const LikelihoodSummary& ls, Eigen::Index i, Eigen::Index j) {
  const Eigen::Index p = ls.mu.size();
  if (i < 0 || j < 0 || i >= p || j >= p) {
    throw ParameterError("variable index out of range (p = " + std::to_string(p) + ")");
  }
  if (i == j) throw ParameterError("conditional expectation needs two distinct variables");
}

}  // namespace

LikelihoodSummary likelihood_summary(const StandardizedProblem& sp, double sigma2) {
  if (!std::isfinite(sigma2) || !(sigma2 > 0.0)) {
    throw ParameterError("noise variance must be positive");
  }
  const Eigen::Index n = sp.rows();
  const Eigen::Index p = sp.cols();
  const char* advice = "; signal-ratio diagnostics need an invertible information matrix X^T X";
  if (n < p) {
    throw DataError("only " + std::to_string(n) + " rows for " + std::to_string(p) +
                    " covariates" + advice);
  }
  const Eigen::MatrixXd info = sp.design_std.transpose() * sp.design_std;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sp.design_std);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    throw DataError("design is rank deficient (rank " + std::to_string(qr.rank()) + " < " +
                    std::to_string(p) + ")" + advice);
  }
  LikelihoodSummary ls;
  ls.sigma2 = sigma2;
  ls.mu = qr.solve(sp.response_std);
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() != Eigen::Success) throw DataError(std::string("X^T X is not positive definite") + advice);
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(p, p));
  ls.covariance = 0.5 * (inv + inv.transpose()) * sigma2;
  return ls;
}

double residual_variance(const StandardizedProblem& sp) {
  const Eigen::Index n = sp.rows();
  const Eigen::Index p = sp.cols();
  if (n <= p + 1) {
    throw DataError("residual variance needs more than p + 1 rows; supply the noise variance");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sp.design_std);
  const Eigen::VectorXd beta = qr.solve(sp.response_std);
  const double rss = (sp.response_std - sp.design_std * beta).squaredNorm();
  // Centering the response used up one more degree of freedom.
  return rss / static_cast<double>(n - p - 1);
}

double conditional_expectation(const LikelihoodSummary& ls, Eigen::Index i, Eigen::Index j) {
  check_pair(ls, i, j);
  return ls.mu(i) - ls.covariance(i, j) * ls.mu(j) / ls.covariance(j, j);
}

double r_ij(const LikelihoodSummary& ls, Eigen::Index i, Eigen::Index j) {
  const double num = conditional_expectation(ls, i, j);
  const double den = conditional_expectation(ls, j, i);
  if (den == 0.0) {
    return num == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                      : std::numeric_limits<double>::infinity();
  }
  return std::abs(num / den);
}

SignalRatioReport r_matrix(const LikelihoodSummary& ls) {
  const Eigen::Index p = ls.mu.size();
  SignalRatioReport out;
  out.mu = ls.mu;
  out.r = Eigen::MatrixXd::Ones(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (i != j) out.r(i, j) = r_ij(ls, i, j);
    }
  }
  return out;
}

}  // namespace fatso
