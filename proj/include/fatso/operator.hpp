#pragma once

#include <vector>

#include <Eigen/Dense>

namespace fatso {

/// Selectivity of the operator. `m` bounds the conditional signal ratio
/// under which two covariates are kept together; `rho` is the ratio of the
/// ball geometry and `theta` the corner angle, with m = tan(theta) and
/// rho = sqrt((1 + m^2) / 2).
class Selectivity {
 public:
  static Selectivity from_m(double m);
  static Selectivity from_rho(double rho);

  double m() const { return m_; }
  double rho() const { return rho_; }
  double theta() const { return theta_; }

 private:
  Selectivity(double m, double rho, double theta) : m_(m), rho_(rho), theta_(theta) {}
  double m_;
  double rho_;
  double theta_;
};

Selectivity selectivity_from_m(double m);

/// Shrinkage either as lambda directly or as k / sigma^2.
class ShrinkageSpec {
 public:
  enum class Mode { direct, noise_scaled };

  static ShrinkageSpec direct(double lambda);
  static ShrinkageSpec noise_scaled(double k, double sigma);

  Mode mode() const { return mode_; }
  /// lambda in direct mode, k / sigma^2 in noise-scaled mode.
  double effective_lambda() const;
  double k() const { return k_; }
  double sigma() const { return sigma_; }

 private:
  ShrinkageSpec(Mode mode, double lambda, double k, double sigma)
      : mode_(mode), lambda_(lambda), k_(k), sigma_(sigma) {}
  Mode mode_;
  double lambda_;
  double k_;
  double sigma_;
};

struct AlphaValue {
  double alpha = 0.0;
  /// d alpha / d beta_i, using sign(0) = 0 on axes. All zeros at beta = 0,
  /// where alpha is not differentiable.
  Eigen::VectorXd dalpha;
};

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
  /// Distance from x to the interval (0 inside).
  double distance(double x) const {
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0.0;
  }
};

/// Offset alpha placing beta on its level curve: the positive root of
///   p (1 - rho^2) a^2 + 2 sum|beta_i| a + sum beta_i^2 = 0.
AlphaValue alpha(const Eigen::VectorXd& beta, const Selectivity& sel);

/// alpha from the sufficient statistics sum|beta_i| and sum beta_i^2.
double alpha_from_sums(double abs_sum, double sq_sum, Eigen::Index p, double rho);

/// lambda * sum (|beta_i| + alpha)^2.
double penalty(const Eigen::VectorXd& beta, const Selectivity& sel, const ShrinkageSpec& shrink);

/// Same value without a ShrinkageSpec.
double penalty_value(const Eigen::VectorXd& beta, const Selectivity& sel, double lambda);

/// Per-coordinate subdifferential of the penalty. Off the axes each
/// interval is a single point; for beta_i = 0 it is symmetric about 0.
std::vector<Interval> penalty_subgradient(const Eigen::VectorXd& beta, const Selectivity& sel,
                                          const ShrinkageSpec& shrink);

std::vector<Interval> penalty_subgradient_value(const Eigen::VectorXd& beta,
                                                const Selectivity& sel, double lambda);

/// Prior variance of beta_i given all other coordinates are zero, derived
/// from the alpha construction: on an axis alpha = kappa |t|, so the
/// conditional log-density is -lambda C t^2 with
///   C = (1 + kappa)^2 + (p - 1) kappa^2.
double axis_conditional_variance(const Selectivity& sel, const ShrinkageSpec& shrink,
                                 Eigen::Index p);

/// sqrt(2) sin(theta - pi/4).
double angular_variance_factor(const Selectivity& sel);

/// lambda = sqrt(2) sin(theta - pi/4) / (var(Y) - sigma^2).
double lambda_heuristic(double var_y, double sigma2, const Selectivity& sel);

}  // namespace fatso
