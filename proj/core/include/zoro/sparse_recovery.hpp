#pragma once

#include <optional>
#include <span>

#include "zoro/types.hpp"

namespace zoro {

struct CosampConfig {
  Index sparsity = 1;
  int max_iterations = 10;
  /// Stop once an accepted iteration lowers the residual by less than this
  /// fraction of its previous value.
  double halting_tol = 1e-8;
  /// Warm start; hard-thresholded to `sparsity` entries before use.
  std::optional<Vector> init;
};

struct SparseSolution {
  Vector values;
  IndexSet support;  // ascending, |support| <= sparsity, holds every nonzero
  double residual_norm = 0.0;
  int iterations_used = 0;
};

/// Greedy solution of  min ||Z v - y||_2  s.t. ||v||_0 <= s  (CoSaMP).
///
/// Each iteration merges the 2s largest proxy entries |Z' r| with the current
/// support, solves least squares there, prunes to the s largest coefficients
/// and recomputes the residual. Ties in either ranking go to the lower index.
/// An iteration that would raise the residual is discarded and ends the run,
/// so accepted residuals never increase.
///
/// Throws ContractViolation for s < 1, s > d, mismatched sizes or non-finite
/// input. Warns (and proceeds) when s > m.
SparseSolution cosamp(const Matrix& Z, const Vector& y, const CosampConfig& cfg);

/// argmin ||Z v - y||_2 over v supported on `support`; zero elsewhere.
/// Rank-deficient systems get the minimum-norm solution.
Vector restricted_least_squares(const Matrix& Z, const Vector& y, std::span<const Index> support);

}  // namespace zoro
