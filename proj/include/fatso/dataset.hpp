#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fatso {

/// Raw regression data: rows are observations, columns are covariates.
struct Dataset {
  Eigen::MatrixXd design;  // n x p, raw units
  Eigen::VectorXd response;
  std::vector<std::string> column_names;
  std::string response_name;

  Eigen::Index rows() const { return design.rows(); }
  Eigen::Index cols() const { return design.cols(); }

  /// Throws DataError unless n, p >= 1, shapes agree, entries are finite and
  /// column names are unique.
  void validate() const;

  /// Subset of rows, in the given order.
  Dataset select_rows(const std::vector<std::size_t>& rows) const;
};

/// Centered/scaled problem. Each design column has mean 0 and unit sum of
/// squares; the response is centered only.
struct StandardizedProblem {
  Eigen::MatrixXd design_std;
  Eigen::VectorXd response_std;
  Eigen::VectorXd column_means;
  Eigen::VectorXd column_scales;  // sqrt of centered raw sum of squares
  double response_mean = 0.0;
  std::vector<std::string> column_names;

  Eigen::Index rows() const { return design_std.rows(); }
  Eigen::Index cols() const { return design_std.cols(); }
};

struct SplitSpec {
  std::size_t train_count = 0;
  std::uint64_t permutation_seed = 0;
};

struct RawCoefficients {
  Eigen::VectorXd beta;
  double intercept = 0.0;
};

/// Reads a comma-separated file with one header row. The response column is
/// extracted and the remaining columns form the design, in file order.
Dataset load_csv(const std::filesystem::path& path, const std::string& response_column);

/// Parses CSV text; `source` names the origin in error messages.
Dataset parse_csv(const std::string& text, const std::string& response_column,
                  const std::string& source = "<input>");

/// Writes design columns followed by the response column.
std::string to_csv(const Dataset& d);

/// Center every column, then scale it to unit sum of squares; center the
/// response. Throws DataError naming the first zero-variance column.
StandardizedProblem standardize(const Dataset& d);

/// Map standardized-scale coefficients back to raw units. Zeros stay
/// exactly zero.
RawCoefficients destandardize_coefficients(const Eigen::VectorXd& beta_std,
                                           const StandardizedProblem& sp);

/// Raw-scale predictions `design * beta + intercept`.
Eigen::VectorXd predict(const Eigen::MatrixXd& design, const RawCoefficients& coef);

/// Seeded permutation of the rows; the first train_count rows of the
/// permuted data form the training set.
std::pair<Dataset, Dataset> split(const Dataset& d, const SplitSpec& s);

/// Sample variance with denominator n.
double sample_variance(const Eigen::VectorXd& y);

}  // namespace fatso
