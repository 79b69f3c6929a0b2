#pragma once

#include <optional>
#include <string>
#include <utility>

#include "zoro/problems.hpp"
#include "zoro/sensing.hpp"
#include "zoro/sparse_recovery.hpp"

namespace zoro {

enum class EstimatorKind { zoro_fixed, zoro_opportunistic, fdsa, spsa };

std::string to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(const std::string& text);

struct GradientEstimate {
  Vector g_hat;
  IndexSet support;  // indices of the nonzero entries of g_hat, ascending
  std::uint64_t queries_used = 0;
  /// ||Z g_hat - y|| / ||y|| for the system the estimate was fitted to
  /// (0 when ||y|| = 0, and for the dense baselines).
  double relative_fit_residual = 0.0;
  EstimatorKind method = EstimatorKind::zoro_fixed;
  /// E_f(x) at the round's base point, when the estimator queried it.
  std::optional<double> base_value;
  /// Opportunistic only: 1 = restricted fit accepted, 2 = full CoSaMP
  /// accepted, 3 = growth loop, 4 = growth hit m >= d and fell back to dense
  /// least squares.
  int stage = 0;
  bool dense_fallback = false;
};

/// Fixed-sparsity estimate: m + 1 queries, normalized system, CoSaMP at
/// sparsity s. `dirs` should hold ceil(b1 s ln(d/s)) rows (see default_m).
GradientEstimate estimate_gradient(Oracle& oracle, const Vector& x, Index sparsity, double delta,
                                   const DirectionSet& dirs, const CosampConfig& base_cfg = {});

/// State carried between opportunistic rounds.
struct OppState {
  DirectionSet dirs;
  IndexSet prev_support;
  Index s_current = 1;
  Index m_current = 0;
};

struct OppOptions {
  double phi = 0.3;
  /// Extra directions added to the restricted-support check. With 0 the
  /// check uses exactly |prev_support| directions, which is a square system
  /// and therefore (when nonsingular) always fits exactly.
  Index stage1_extra = 0;
  int cosamp_iterations = 10;
};

/// Adaptive estimate that first reuses the previous support.
///
///  1. Sample |S| (+ stage1_extra) directions, fit on S with unnormalized
///     rows; accept if the relative residual is <= phi.
///  2. Otherwise sample the remaining directions (same base value), rescale
///     to 1/sqrt(m) and run CoSaMP at sparsity |S|.
///  3. While the residual test fails, append max(1, ceil(ln(d/s))) new
///     directions (capped at d total), increment s and rerun CoSaMP. Once
///     m >= d and the test still fails, fit all coordinates by least squares.
///
/// The returned state owns the grown direction set; s_current is reset to
/// the support size of the returned estimate.
std::pair<GradientEstimate, OppState> opportunistic_estimate(Oracle& oracle, const Vector& x,
                                                             OppState state, double delta,
                                                             const OppOptions& options = {});

/// Forward differences along every coordinate: d + 1 queries.
GradientEstimate fdsa_gradient(Oracle& oracle, const Vector& x, double delta);

/// Mean over `batch` Rademacher directions z of
/// (E(x + delta z) - E(x - delta z)) / (2 delta) * z: 2 * batch queries.
GradientEstimate spsa_gradient(Oracle& oracle, const Vector& x, double delta, int batch, Rng& rng);

/// Indices of the nonzero entries of v (ascending).
IndexSet nonzero_support(const Vector& v);

}  // namespace zoro
