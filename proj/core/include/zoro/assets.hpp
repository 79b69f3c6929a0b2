#pragma once

#include <filesystem>
#include <optional>

#include "zoro/problems.hpp"

namespace zoro {

/// Per-asset return statistics. Covariance is rebuilt as s_i s_j rho_ij.
struct AssetTable {
  Vector means;
  Vector stddevs;
  Matrix correlations;

  Index size() const noexcept { return means.size(); }

  /// Throws InvalidSpec on mismatched sizes, negative deviations, asymmetric
  /// correlations or a non-unit diagonal.
  void validate() const;
};

/// Covariance with negative eigenvalues clipped to zero. Emits a warning when
/// clipping was needed.
Matrix covariance_psd(const AssetTable& assets);

/// Reads means.csv, stddevs.csv and correlations.csv from `directory`.
/// Malformed content raises ParseError with the file, line and column.
AssetTable load_asset_table(const std::filesystem::path& directory);

void write_asset_table(const AssetTable& assets, const std::filesystem::path& directory);

/// One-factor market model: correlations beta_i beta_j off the diagonal.
AssetTable make_synthetic_assets(Index count, Seed seed);

/// Penalized portfolio risk
///
///   x'Cx / (2 (sum x)^2) + lambda * min(m'x / sum x - r, 0)^2
///
/// The objective is scale invariant and undefined when sum x == 0
/// (DomainError). L and H are evaluated at the equal-weight portfolio; the
/// penalty curvature is included as if the return constraint were active.
ProblemSpec make_portfolio_oracle(const AssetTable& assets, double lambda, double min_return,
                                  std::optional<double> reference_optimum = std::nullopt);

}  // namespace zoro
