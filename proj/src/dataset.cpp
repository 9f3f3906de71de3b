#include "fatso/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fatso/errors.hpp"
#include "fatso/rng.hpp"

namespace fatso {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

bool parse_double(const std::string& cell, double& value) {
  if (cell.empty()) return false;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && std::isfinite(value);
}

}  // namespace

void Dataset::validate() const {
  if (design.rows() < 1 || design.cols() < 1) {
    throw DataError("dataset needs at least one row and one covariate");
  }
  if (response.size() != design.rows()) {
    throw DataError("response length does not match the number of design rows");
  }
  if (static_cast<Eigen::Index>(column_names.size()) != design.cols()) {
    throw DataError("column name count does not match the number of design columns");
  }
  if (!design.allFinite() || !response.allFinite()) {
    throw DataError("dataset contains non-finite values");
  }
  std::set<std::string> seen;
  for (const auto& name : column_names) {
    if (!seen.insert(name).second) throw DataError("duplicate column name '" + name + "'");
  }
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.design.resize(static_cast<Eigen::Index>(rows.size()), design.cols());
  out.response.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = static_cast<Eigen::Index>(rows[r]);
    out.design.row(static_cast<Eigen::Index>(r)) = design.row(src);
    out.response(static_cast<Eigen::Index>(r)) = response(src);
  }
  out.column_names = column_names;
  out.response_name = response_name;
  return out;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& response_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), response_column, path.string());
}

Dataset parse_csv(const std::string& text, const std::string& response_column,
                  const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      header = split_fields(line);
      break;
    }
  }
  if (header.empty()) throw DataError(source + ": missing header row");
  if (header.size() >= 3 && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  std::set<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) {
      throw DataError(source + ": empty header name in column " + std::to_string(c + 1));
    }
    if (!names.insert(header[c]).second) {
      throw DataError(source + ": duplicate header '" + header[c] + "'");
    }
  }
  std::size_t response_index = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == response_column) response_index = c;
  }
  if (response_index == header.size()) {
    throw DataError(source + ": response column '" + response_column + "' not found");
  }
  if (header.size() < 2) throw DataError(source + ": no covariate columns");

  std::vector<std::vector<double>> rows;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row_number;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError(source + ": row " + std::to_string(row_number) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parse_double(fields[c], values[c])) {
        throw DataError(source + ": cannot parse '" + fields[c] + "' at row " +
                        std::to_string(row_number) + ", column " + std::to_string(c + 1) +
                        " ('" + header[c] + "')");
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw DataError(source + ": no data rows");

  Dataset d;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(header.size() - 1);
  d.design.resize(n, p);
  d.response.resize(n);
  d.response_name = response_column;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != response_index) d.column_names.push_back(header[c]);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      const double v = rows[static_cast<std::size_t>(i)][c];
      if (c == response_index) {
        d.response(i) = v;
      } else {
        d.design(i, j++) = v;
      }
    }
  }
  d.validate();
  return d;
}

std::string to_csv(const Dataset& d) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& name : d.column_names) out << name << ',';
  out << d.response_name << '\n';
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) out << d.design(i, j) << ',';
    out << d.response(i) << '\n';
  }
  return out.str();
}

StandardizedProblem standardize(const Dataset& d) {
  d.validate();
  StandardizedProblem sp;
  const Eigen::Index n = d.rows();
  const Eigen::Index p = d.cols();
  sp.column_names = d.column_names;
  sp.column_means = d.design.colwise().mean().transpose();
  sp.design_std = d.design.rowwise() - sp.column_means.transpose();
  sp.column_scales.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double scale = sp.design_std.col(j).norm();
    // Exact constants center to exactly zero; anything below this is
    // rounding noise around a constant column.
    const double magnitude = d.design.col(j).cwiseAbs().maxCoeff();
    if (!(scale > 1e-12 * std::max(1.0, magnitude) * std::sqrt(static_cast<double>(n)))) {
      throw DataError("column '" + d.column_names[static_cast<std::size_t>(j)] +
                      "' has zero variance and cannot be standardized");
    }
    sp.column_scales(j) = scale;
    sp.design_std.col(j) /= scale;
  }
  sp.response_mean = d.response.mean();
  sp.response_std = d.response.array() - sp.response_mean;
  return sp;
}

RawCoefficients destandardize_coefficients(const Eigen::VectorXd& beta_std,
                                           const StandardizedProblem& sp) {
  if (beta_std.size() != sp.cols()) {
    throw ParameterError("coefficient vector has length " + std::to_string(beta_std.size()) +
                         ", expected " + std::to_string(sp.cols()));
  }
  RawCoefficients out;
  out.beta = beta_std.cwiseQuotient(sp.column_scales);
  out.intercept = sp.response_mean - sp.column_means.dot(out.beta);
  return out;
}

Eigen::VectorXd predict(const Eigen::MatrixXd& design, const RawCoefficients& coef) {
  if (design.cols() != coef.beta.size()) {
    throw DataError("design has " + std::to_string(design.cols()) +
                    " columns but the model has " + std::to_string(coef.beta.size()));
  }
  return (design * coef.beta).array() + coef.intercept;
}

std::pair<Dataset, Dataset> split(const Dataset& d, const SplitSpec& s) {
  const auto n = static_cast<std::size_t>(d.rows());
  if (s.train_count < 1 || s.train_count >= n) {
    throw ParameterError("train count " + std::to_string(s.train_count) +
                         " must be between 1 and " + std::to_string(n - 1));
  }
  Rng rng(s.permutation_seed);
  const auto perm = rng.permutation(n);
  const std::vector<std::size_t> train(perm.begin(),
                                       perm.begin() + static_cast<std::ptrdiff_t>(s.train_count));
  const std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(s.train_count),
                                      perm.end());
  return {d.select_rows(train), d.select_rows(test)};
}

double sample_variance(const Eigen::VectorXd& y) {
  if (y.size() == 0) throw DataError("sample variance of an empty sequence");
  const double mean = y.mean();
  return (y.array() - mean).square().sum() / static_cast<double>(y.size());
}

}  // namespace fatso
