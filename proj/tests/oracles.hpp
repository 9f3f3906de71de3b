#pragma once

// Test-only reference computations, kept independent of the library's
// derivative and closed-form code paths.

#include <cmath>
#include <functional>

#include <Eigen/Dense>

namespace fatso::testing {

/// Central difference of f along coordinate i.
inline double central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x, Eigen::Index i, double step = 1e-6) {
  Eigen::VectorXd plus = x;
  Eigen::VectorXd minus = x;
  plus(i) += step;
  minus(i) -= step;
  return (f(plus) - f(minus)) / (2.0 * step);
}

/// Composite Simpson rule on [lo, hi] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int panels) {
  if (panels % 2) ++panels;
  const double h = (hi - lo) / panels;
  double sum = f(lo) + f(hi);
  for (int k = 1; k < panels; ++k) sum += f(lo + k * h) * (k % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

/// alpha located by bisection on the defining identity
///   ||(|beta| + a 1)|| = rho * sqrt(p) * a,
/// without using the closed-form root.
inline double alpha_by_bisection(const Eigen::VectorXd& beta, double rho) {
  const double p = static_cast<double>(beta.size());
  const auto gap = [&](double a) {
    return (beta.array().abs() + a).matrix().norm() - rho * std::sqrt(p) * a;
  };
  if (beta.cwiseAbs().sum() == 0.0) return 0.0;
  double lo = 0.0;
  double hi = beta.norm() + 1.0;
  while (gap(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double relative_error(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace fatso::testing
