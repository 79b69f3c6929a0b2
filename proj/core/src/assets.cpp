#include "zoro/assets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "zoro/csv.hpp"
#include "zoro/log.hpp"

namespace zoro {

namespace {

using Rows = std::vector<std::vector<double>>;

Rows read_numeric_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Rows rows;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::size_t end = comma == std::string::npos ? line.size() : comma;
      std::size_t first = start;
      std::size_t last = end;
      while (first < last && (line[first] == ' ' || line[first] == '\t')) ++first;
      while (last > first && (line[last - 1] == ' ' || line[last - 1] == '\t')) --last;
      const int column = static_cast<int>(first) + 1;
      if (first == last) throw ParseError(path.string(), line_number, column, "empty field");
      double value = 0.0;
      const char* begin = line.data() + first;
      const char* stop = line.data() + last;
      // from_chars rejects a leading '+'; accept it for hand-edited files.
      if (*begin == '+') ++begin;
      const auto [ptr, ec] = std::from_chars(begin, stop, value);
      if (ec != std::errc() || ptr != stop) {
        throw ParseError(path.string(), line_number, column,
                         "not a number: '" + line.substr(first, last - first) + "'");
      }
      if (!std::isfinite(value)) {
        throw ParseError(path.string(), line_number, column, "non-finite value");
      }
      row.push_back(value);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Vector read_column(const std::filesystem::path& path) {
  const Rows rows = read_numeric_rows(path);
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 1) {
      throw ParseError(path.string(), static_cast<int>(i) + 1, 1,
                       "expected one value per line, found " + std::to_string(rows[i].size()));
    }
    out[static_cast<Index>(i)] = rows[i][0];
  }
  return out;
}

}  // namespace

void AssetTable::validate() const {
  const Index d = means.size();
  if (d < 1) throw InvalidSpec("asset table is empty");
  if (stddevs.size() != d) throw InvalidSpec("stddevs and means differ in length");
  if (correlations.rows() != d || correlations.cols() != d) {
    throw InvalidSpec("correlation matrix must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  if ((stddevs.array() < 0.0).any()) throw InvalidSpec("negative standard deviation");
  for (Index i = 0; i < d; ++i) {
    if (std::abs(correlations(i, i) - 1.0) > 1e-9) {
      throw InvalidSpec("correlation diagonal entry " + std::to_string(i + 1) + " is not 1");
    }
    for (Index j = i + 1; j < d; ++j) {
      if (std::abs(correlations(i, j) - correlations(j, i)) > 1e-9) {
        throw InvalidSpec("correlation matrix is not symmetric at (" + std::to_string(i + 1) +
                          "," + std::to_string(j + 1) + ")");
      }
    }
  }
}

Matrix covariance_psd(const AssetTable& assets) {
  assets.validate();
  const Matrix covariance =
      assets.stddevs.asDiagonal() * assets.correlations * assets.stddevs.asDiagonal();
  const Matrix symmetric = 0.5 * (covariance + covariance.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric);
  const Vector& values = eig.eigenvalues();
  if (values.minCoeff() >= 0.0) return symmetric;
  warn("covariance reconstructed from correlations is indefinite (min eigenvalue " +
       std::to_string(values.minCoeff()) + "); clipping negative eigenvalues to zero");
  const Vector clipped = values.cwiseMax(0.0);
  return eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
}

AssetTable load_asset_table(const std::filesystem::path& directory) {
  AssetTable table;
  table.means = read_column(directory / "means.csv");
  table.stddevs = read_column(directory / "stddevs.csv");
  const auto corr_path = directory / "correlations.csv";
  const Rows rows = read_numeric_rows(corr_path);
  const auto d = static_cast<std::size_t>(table.means.size());
  if (rows.size() != d) {
    throw ParseError(corr_path.string(), static_cast<int>(rows.size()) + 1, 1,
                     "expected " + std::to_string(d) + " rows, found " +
                         std::to_string(rows.size()));
  }
  table.correlations.resize(static_cast<Index>(d), static_cast<Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    if (rows[i].size() != d) {
      throw ParseError(corr_path.string(), static_cast<int>(i) + 1, 1,
                       "expected " + std::to_string(d) + " values, found " +
                           std::to_string(rows[i].size()));
    }
    for (std::size_t j = 0; j < d; ++j) {
      table.correlations(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  table.validate();
  return table;
}

void write_asset_table(const AssetTable& assets, const std::filesystem::path& directory) {
  assets.validate();
  std::filesystem::create_directories(directory);
  std::ostringstream means;
  std::ostringstream stddevs;
  std::ostringstream corr;
  for (Index i = 0; i < assets.size(); ++i) {
    means << format_double(assets.means[i]) << '\n';
    stddevs << format_double(assets.stddevs[i]) << '\n';
    for (Index j = 0; j < assets.size(); ++j) {
      if (j > 0) corr << ',';
      corr << format_double(assets.correlations(i, j));
    }
    corr << '\n';
  }
  write_file_atomic(directory / "means.csv", means.str());
  write_file_atomic(directory / "stddevs.csv", stddevs.str());
  write_file_atomic(directory / "correlations.csv", corr.str());
}

AssetTable make_synthetic_assets(Index count, Seed seed) {
  if (count < 1) throw InvalidSpec("synthetic asset table needs at least one asset");
  Rng rng(seed);
  AssetTable table;
  table.means.resize(count);
  table.stddevs.resize(count);
  Vector beta(count);
  for (Index i = 0; i < count; ++i) {
    table.stddevs[i] = rng.uniform(0.02, 0.06);
    table.means[i] = rng.uniform(-0.001, 0.008);
    beta[i] = rng.uniform(0.2, 0.7);
  }
  table.correlations = beta * beta.transpose();
  table.correlations.diagonal().setOnes();
  return table;
}

ProblemSpec make_portfolio_oracle(const AssetTable& assets, double lambda, double min_return,
                                  std::optional<double> reference_optimum) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidSpec("portfolio lambda must be > 0");
  if (!std::isfinite(min_return)) throw InvalidSpec("portfolio target return must be finite");
  auto covariance = std::make_shared<const Matrix>(covariance_psd(assets));
  auto means = std::make_shared<const Vector>(assets.means);
  const Index d = assets.size();

  // Curvature at the equal-weight portfolio (sum x = 1).
  const Vector x = Vector::Constant(d, 1.0 / static_cast<double>(d));
  const Vector ones = Vector::Ones(d);
  const Vector cx = *covariance * x;
  const double quad = x.dot(cx);
  const Matrix risk_hessian = *covariance - 2.0 * (cx * ones.transpose() + ones * cx.transpose()) +
                              3.0 * quad * ones * ones.transpose();
  const Vector return_gradient = *means - means->dot(x) * ones;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (risk_hessian + risk_hessian.transpose()),
                                            Eigen::EigenvaluesOnly);
  const double risk_norm = eig.eigenvalues().cwiseAbs().maxCoeff();

  ProblemMetadata meta;
  meta.name = "portfolio";
  meta.dimension = d;
  meta.lipschitz = std::max(risk_norm + 2.0 * lambda * return_gradient.squaredNorm(),
                            std::numeric_limits<double>::min());
  meta.hessian_l1_bound = risk_hessian.cwiseAbs().sum() +
                          2.0 * lambda * return_gradient.lpNorm<1>() * return_gradient.lpNorm<1>();
  meta.optimum_value = reference_optimum;

  auto objective = [covariance, means, lambda, min_return](const Vector& w) {
    const double total = w.sum();
    if (total == 0.0) throw DomainError("portfolio objective undefined when sum(x) == 0");
    const double risk = w.dot(*covariance * w) / (2.0 * total * total);
    const double shortfall = std::min(means->dot(w) / total - min_return, 0.0);
    return risk + lambda * shortfall * shortfall;
  };
  auto gradient = [covariance, means, lambda, min_return](const Vector& w) -> Vector {
    const double total = w.sum();
    if (total == 0.0) throw DomainError("portfolio gradient undefined when sum(x) == 0");
    const Vector cw = *covariance * w;
    const double quad = w.dot(cw);
    Vector g = cw / (total * total) -
               Vector::Constant(w.size(), quad / (total * total * total));
    const double mean_return = means->dot(w) / total;
    const double shortfall = mean_return - min_return;
    if (shortfall < 0.0) {
      g += 2.0 * lambda * shortfall * (*means - Vector::Constant(w.size(), mean_return)) / total;
    }
    return g;
  };
  return ProblemSpec(std::move(meta), std::move(objective), std::move(gradient));
}

}  // namespace zoro
