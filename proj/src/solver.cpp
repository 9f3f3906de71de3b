#include "fatso/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "fatso/errors.hpp"

namespace fatso {
namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

// FATSO penalty at unit weight, written through the level-set identity
// sum (|b_i| + alpha)^2 = rho^2 p alpha^2, evaluated from running sums.
struct FatsoSums {
  double rho = 0.0;
  Eigen::Index p = 0;

  double value(double abs_sum, double sq_sum) const {
    if (abs_sum == 0.0) return 0.0;
    const double a = alpha_from_sums(abs_sum, sq_sum, p, rho);
    return rho * rho * static_cast<double>(p) * a * a;
  }

  // Derivative along +|b_j| of the penalty, with |b_j| = mag and the other
  // coordinates summarized by (abs_sum, sq_sum), which include b_j.
  double slope(double abs_sum, double sq_sum, double mag) const {
    if (abs_sum == 0.0) return 0.0;
    const double lead = static_cast<double>(p) * (rho * rho - 1.0);
    const double root_disc = std::sqrt(4.0 * abs_sum * abs_sum + 4.0 * lead * sq_sum);
    const double a = (2.0 * abs_sum + root_disc) / (2.0 * lead);
    return 2.0 * rho * rho * static_cast<double>(p) * a * 2.0 * (a + mag) / root_disc;
  }
};

}  // namespace

Objective::Objective(PenaltyKind kind, std::shared_ptr<const StandardizedProblem> problem,
                     std::optional<Selectivity> sel, ShrinkageSpec shrink, double noise_variance)
    : kind_(kind),
      problem_(std::move(problem)),
      sel_(sel),
      shrink_(shrink),
      noise_variance_(noise_variance) {
  if (!std::isfinite(noise_variance_) || !(noise_variance_ > 0.0)) {
    throw ParameterError("noise variance must be positive");
  }
  if (!problem_) throw ParameterError("objective needs a problem");
  if (problem_->cols() < 1 || problem_->rows() < 1) throw ParameterError("empty problem");
  if (!problem_->design_std.allFinite() || !problem_->response_std.allFinite()) {
    throw DataError("standardized problem has non-finite entries");
  }
}

Objective Objective::fatso(std::shared_ptr<const StandardizedProblem> problem, Selectivity sel,
                           ShrinkageSpec shrink, double noise_variance) {
  return Objective(PenaltyKind::fatso, std::move(problem), sel, shrink, noise_variance);
}

Objective Objective::lasso(std::shared_ptr<const StandardizedProblem> problem,
                           ShrinkageSpec shrink, double noise_variance) {
  return Objective(PenaltyKind::lasso, std::move(problem), std::nullopt, shrink, noise_variance);
}

double Objective::weight() const {
  if (shrink_.mode() == ShrinkageSpec::Mode::noise_scaled) return shrink_.k();
  return shrink_.effective_lambda() * noise_variance_;
}

double Objective::scale() const {
  return shrink_.mode() == ShrinkageSpec::Mode::noise_scaled ? 1.0 : 1.0 / noise_variance_;
}

double Objective::penalty_term(const Eigen::VectorXd& beta) const {
  if (kind_ == PenaltyKind::lasso) return weight() * beta.cwiseAbs().sum();
  return penalty_value(beta, *sel_, weight());
}

double Objective::value(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd resid = problem_->response_std - problem_->design_std * beta;
  return scale() * (0.5 * resid.squaredNorm() + penalty_term(beta));
}

std::vector<Interval> Objective::subdifferential(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd grad =
      -problem_->design_std.transpose() * (problem_->response_std - problem_->design_std * beta);
  std::vector<Interval> out;
  if (kind_ == PenaltyKind::lasso) {
    out.resize(static_cast<std::size_t>(beta.size()));
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
      const double w = weight();
      out[static_cast<std::size_t>(i)] =
          beta(i) == 0.0 ? Interval{-w, w} : Interval{w * sign(beta(i)), w * sign(beta(i))};
    }
  } else {
    out = penalty_subgradient_value(beta, *sel_, weight());
  }
  const double sc = scale();
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    auto& iv = out[static_cast<std::size_t>(i)];
    iv.lo = sc * (iv.lo + grad(i));
    iv.hi = sc * (iv.hi + grad(i));
  }
  return out;
}

void FitConfig::validate() const {
  if (max_sweeps < 1) throw ParameterError("max_sweeps must be positive");
  if (!(objective_tol > 0.0)) throw ParameterError("objective_tol must be positive");
  if (!(coordinate_tol > 0.0)) throw ParameterError("coordinate_tol must be positive");
  if (active_threshold < 0.0) throw ParameterError("active_threshold must be nonnegative");
}

double optimality_check(const Objective& obj, const Eigen::VectorXd& beta) {
  if (!beta.allFinite()) throw ParameterError("coefficient vector has non-finite entries");
  if (beta.size() != obj.dimension()) throw ParameterError("coefficient length mismatch");
  double total = 0.0;
  for (const auto& iv : obj.subdifferential(beta)) {
    const double d = iv.distance(0.0);
    total += d * d;
  }
  return std::sqrt(total);
}

FitResult fit(const Objective& obj, const FitConfig& cfg) {
  cfg.validate();
  const auto& prob = obj.problem();
  const Eigen::MatrixXd& x = prob.design_std;
  const Eigen::Index p = x.cols();
  const double w = obj.weight();
  const bool is_lasso = obj.kind() == PenaltyKind::lasso;
  const FatsoSums sums{is_lasso ? 0.0 : obj.selectivity()->rho(), p};

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd resid = prob.response_std;
  const Eigen::VectorXd col_sq = x.colwise().squaredNorm().transpose();

  FitResult result;
  double current = obj.value(beta);
  if (!std::isfinite(current)) throw NumericalError("objective is not finite at the start");
  result.objective_trace.push_back(current);

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    double abs_sum = beta.cwiseAbs().sum();
    double sq_sum = beta.squaredNorm();

    for (Eigen::Index j = 0; j < p; ++j) {
      const double old = beta(j);
      const double a = col_sq(j);
      // 1-D problem in t: 0.5 a t^2 - b t + w * pen(t) + const.
      const double b = x.col(j).dot(resid) + a * old;
      double next = 0.0;

      if (is_lasso) {
        next = std::abs(b) <= w ? 0.0 : (b - w * sign(b)) / a;
      } else {
        const double rest_abs = std::max(0.0, abs_sum - std::abs(old));
        const double rest_sq = std::max(0.0, sq_sum - old * old);
        const double kink = w * sums.slope(rest_abs, rest_sq, 0.0);
        if (std::abs(b) > kink) {
          const double target = std::abs(b);
          auto derivative = [&](double u) {
            return a * u - target + w * sums.slope(rest_abs + u, rest_sq + u * u, u);
          };
          double lo = 0.0;
          double hi = target / a;
          while (hi - lo > cfg.coordinate_tol) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (derivative(mid) > 0.0) {
              hi = mid;
            } else {
              lo = mid;
            }
          }
          next = sign(b) * 0.5 * (lo + hi);

          auto local = [&](double t) {
            return 0.5 * a * t * t - b * t +
                   w * sums.value(rest_abs + std::abs(t), rest_sq + t * t);
          };
          if (local(next) > local(old)) next = old;
        }
      }

      if (next != old) {
        resid -= x.col(j) * (next - old);
        abs_sum += std::abs(next) - std::abs(old);
        sq_sum += next * next - old * old;
        beta(j) = next;
      }
    }

    const double value = obj.value(beta);
    if (!std::isfinite(value)) throw NumericalError("objective became non-finite");
    result.objective_trace.push_back(value);
    result.sweeps_used = sweep;
    const double change = std::abs(current - value);
    current = value;
    // Residual recomputed from scratch once per sweep to stop drift.
    resid = prob.response_std - x * beta;

    if (change <= cfg.objective_tol * std::max(std::abs(value), std::numeric_limits<double>::min())) {
      const double residual = optimality_check(obj, beta);
      if (residual <= residual_tolerance(value)) {
        result.converged = true;
        result.optimality_residual = residual;
        break;
      }
    }
  }

  if (!result.converged) result.optimality_residual = optimality_check(obj, beta);
  result.objective_value = current;
  result.beta_std = beta;
  for (Eigen::Index i = 0; i < p; ++i) {
    if (std::abs(beta(i)) > cfg.active_threshold && beta(i) != 0.0) {
      result.active_set.push_back(static_cast<std::size_t>(i));
    }
  }
  const auto raw = destandardize_coefficients(beta, prob);
  result.beta_raw = raw.beta;
  result.intercept = raw.intercept;
  return result;
}

namespace {

double golden_section(const std::function<double(double)>& f, double lo, double hi, double& best) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  const double x = fc <= fd ? c : d;
  best = std::min(fc, fd);
  return x;
}

}  // namespace

OracleResult polish(const Objective& obj, const Eigen::VectorXd& start, double initial_width) {
  Eigen::VectorXd beta = start;
  double current = obj.value(beta);
  const Eigen::Index p = beta.size();
  for (int sweep = 0; sweep < 20000; ++sweep) {
    const double before = current;
    for (Eigen::Index j = 0; j < p; ++j) {
      auto line = [&](double t) {
        Eigen::VectorXd trial = beta;
        trial(j) = t;
        return obj.value(trial);
      };
      double width = initial_width;
      for (int grow = 0; grow < 60; ++grow) {
        double value = 0.0;
        const double lo = beta(j) - width;
        const double hi = beta(j) + width;
        const double t = golden_section(line, lo, hi, value);
        // The kink at zero is where minimizers sit; test it directly.
        const bool brackets_zero = lo < 0.0 && hi > 0.0;
        double cand = t;
        if (brackets_zero) {
          const double at_zero = line(0.0);
          if (at_zero <= value) {
            cand = 0.0;
            value = at_zero;
          }
        }
        if (value <= current) {
          beta(j) = cand;
          current = value;
        }
        const bool at_edge = std::abs(t - lo) < 1e-3 * width || std::abs(hi - t) < 1e-3 * width;
        if (!at_edge) break;
        width *= 4.0;
      }
    }
    if (before - current <= 1e-15 * (1.0 + std::abs(current))) break;
  }
  return {beta, current};
}

OracleResult brute_force_oracle(const Objective& obj, double bounds, int grid_points) {
  const Eigen::Index p = obj.dimension();
  if (p > 3) throw ParameterError("brute-force oracle supports at most 3 covariates");
  if (grid_points < 101) throw ParameterError("brute-force oracle needs at least 101 grid points");
  if (!(bounds > 0.0)) throw ParameterError("oracle bounds must be positive");

  const double step = 2.0 * bounds / static_cast<double>(grid_points - 1);
  std::vector<int> index(static_cast<std::size_t>(p), 0);
  Eigen::VectorXd beta(p);
  Eigen::VectorXd best_beta = Eigen::VectorXd::Zero(p);
  double best = obj.value(best_beta);
  while (true) {
    for (Eigen::Index i = 0; i < p; ++i) {
      beta(i) = -bounds + step * index[static_cast<std::size_t>(i)];
    }
    const double v = obj.value(beta);
    if (v < best) {
      best = v;
      best_beta = beta;
    }
    Eigen::Index k = 0;
    while (k < p && ++index[static_cast<std::size_t>(k)] == grid_points) {
      index[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == p) break;
  }
  return polish(obj, best_beta, step);
}

double lasso_selection_threshold(const StandardizedProblem& problem) {
  if (problem.cols() != 2) throw ParameterError("selection threshold probe needs exactly 2 covariates");
  auto shared = std::make_shared<const StandardizedProblem>(problem);
  const Eigen::VectorXd score = problem.design_std.transpose() * problem.response_std;
  const double top = score.cwiseAbs().maxCoeff();
  if (!(top > 0.0)) throw DataError("response is orthogonal to both covariates");

  auto nonzero = [&](double lambda) {
    return fit(Objective::lasso(shared, ShrinkageSpec::direct(lambda))).active_set.size();
  };

  // Above max |X^T y| every coefficient is zero.
  double hi = top;
  double lo = top * 1e-9;
  if (nonzero(lo) != 2) {
    throw DataError("no shrinkage level keeps both coefficients; the likelihood slope at zero is degenerate");
  }
  while (hi - lo > 1e-8 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (nonzero(mid) <= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace fatso
