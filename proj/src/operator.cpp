#include "fatso/operator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fatso/errors.hpp"

namespace fatso {
namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

void require_finite(const Eigen::VectorXd& beta) {
  if (!beta.allFinite()) throw ParameterError("coefficient vector has non-finite entries");
  if (beta.size() < 1) throw ParameterError("coefficient vector is empty");
}

}  // namespace

Selectivity Selectivity::from_m(double m) {
  if (!std::isfinite(m) || !(m > 1.0)) throw ParameterError("m must exceed 1");
  return Selectivity(m, std::sqrt((1.0 + m * m) / 2.0), std::atan(m));
}

Selectivity Selectivity::from_rho(double rho) {
  if (!std::isfinite(rho) || !(rho > 1.0)) throw ParameterError("rho must exceed 1");
  return from_m(std::sqrt(2.0 * rho * rho - 1.0));
}

Selectivity selectivity_from_m(double m) { return Selectivity::from_m(m); }

ShrinkageSpec ShrinkageSpec::direct(double lambda) {
  if (!std::isfinite(lambda) || !(lambda > 0.0)) throw ParameterError("lambda must be positive");
  return ShrinkageSpec(Mode::direct, lambda, 0.0, 0.0);
}

ShrinkageSpec ShrinkageSpec::noise_scaled(double k, double sigma) {
  if (!std::isfinite(k) || !(k > 0.0)) throw ParameterError("k must be positive");
  if (!std::isfinite(sigma) || !(sigma > 0.0)) throw ParameterError("sigma must be positive");
  return ShrinkageSpec(Mode::noise_scaled, 0.0, k, sigma);
}

double ShrinkageSpec::effective_lambda() const {
  return mode_ == Mode::direct ? lambda_ : k_ / (sigma_ * sigma_);
}

double alpha_from_sums(double abs_sum, double sq_sum, Eigen::Index p, double rho) {
  // Quadratic a^2 * p(1 - rho^2) + a * 2 S1 + S2 = 0 with p(1 - rho^2) < 0.
  // Written with the negated leading coefficient the root needs no
  // cancellation: a = (2 S1 + sqrt(4 S1^2 + 4 S2 p (rho^2 - 1))) / (2 p (rho^2 - 1)).
  const double lead = static_cast<double>(p) * (rho * rho - 1.0);
  const double b = 2.0 * abs_sum;
  const double disc = b * b + 4.0 * lead * sq_sum;
  return (b + std::sqrt(disc)) / (2.0 * lead);
}

AlphaValue alpha(const Eigen::VectorXd& beta, const Selectivity& sel) {
  require_finite(beta);
  const Eigen::Index p = beta.size();
  const double rho = sel.rho();
  const double abs_sum = beta.cwiseAbs().sum();
  const double sq_sum = beta.squaredNorm();

  AlphaValue out;
  out.dalpha = Eigen::VectorXd::Zero(p);
  if (abs_sum == 0.0) return out;

  const double lead = static_cast<double>(p) * (rho * rho - 1.0);
  const double b = 2.0 * abs_sum;
  const double root_disc = std::sqrt(b * b + 4.0 * lead * sq_sum);
  out.alpha = (b + root_disc) / (2.0 * lead);
  // Implicit differentiation of the quadratic; its a-derivative equals
  // -sqrt(disc) at the chosen root.
  for (Eigen::Index i = 0; i < p; ++i) {
    out.dalpha(i) = 2.0 * sign(beta(i)) * (out.alpha + std::abs(beta(i))) / root_disc;
  }
  return out;
}

double penalty_value(const Eigen::VectorXd& beta, const Selectivity& sel, double lambda) {
  const double a = alpha(beta, sel).alpha;
  return lambda * (beta.array().abs() + a).square().sum();
}

double penalty(const Eigen::VectorXd& beta, const Selectivity& sel, const ShrinkageSpec& shrink) {
  return penalty_value(beta, sel, shrink.effective_lambda());
}

std::vector<Interval> penalty_subgradient_value(const Eigen::VectorXd& beta,
                                                const Selectivity& sel, double lambda) {
  const AlphaValue av = alpha(beta, sel);
  const Eigen::Index p = beta.size();
  std::vector<Interval> out(static_cast<std::size_t>(p));
  // At beta = 0 the penalty is O(|beta|^2), so its subdifferential is {0}.
  if (av.alpha == 0.0) return out;

  // dP/dbeta_i = 2 lambda (|beta_i| + alpha) s_i + 2 lambda sum_j(|beta_j| + alpha) dalpha_i
  const double total = (beta.array().abs() + av.alpha).sum();
  const double abs_sum = beta.cwiseAbs().sum();
  const double lead = static_cast<double>(p) * (sel.rho() * sel.rho() - 1.0);
  const double root_disc = std::sqrt(4.0 * abs_sum * abs_sum + 4.0 * lead * beta.squaredNorm());
  for (Eigen::Index i = 0; i < p; ++i) {
    const double mag = std::abs(beta(i));
    // Magnitude of the one-sided derivative along +|beta_i|.
    const double slope =
        2.0 * lambda * (mag + av.alpha) + 2.0 * lambda * total * 2.0 * (av.alpha + mag) / root_disc;
    auto& iv = out[static_cast<std::size_t>(i)];
    if (beta(i) > 0.0) {
      iv = {slope, slope};
    } else if (beta(i) < 0.0) {
      iv = {-slope, -slope};
    } else {
      iv = {-slope, slope};
    }
  }
  return out;
}

std::vector<Interval> penalty_subgradient(const Eigen::VectorXd& beta, const Selectivity& sel,
                                          const ShrinkageSpec& shrink) {
  return penalty_subgradient_value(beta, sel, shrink.effective_lambda());
}

double axis_conditional_variance(const Selectivity& sel, const ShrinkageSpec& shrink,
                                 Eigen::Index p) {
  if (p < 2) throw ParameterError("axis conditional variance needs p >= 2");
  const double excess = static_cast<double>(p) * (sel.rho() * sel.rho() - 1.0);
  const double kappa = (1.0 + std::sqrt(1.0 + excess)) / excess;
  const double curvature =
      (1.0 + kappa) * (1.0 + kappa) + static_cast<double>(p - 1) * kappa * kappa;
  return 1.0 / (2.0 * shrink.effective_lambda() * curvature);
}

double angular_variance_factor(const Selectivity& sel) {
  return std::sqrt(2.0) * std::sin(sel.theta() - std::numbers::pi / 4.0);
}

double lambda_heuristic(double var_y, double sigma2, const Selectivity& sel) {
  if (!std::isfinite(var_y) || !std::isfinite(sigma2) || sigma2 < 0.0) {
    throw ParameterError("variances must be finite and nonnegative");
  }
  if (!(var_y > sigma2)) throw ParameterError("response variance does not exceed noise variance");
  return angular_variance_factor(sel) / (var_y - sigma2);
}

}  // namespace fatso
