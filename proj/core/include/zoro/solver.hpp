#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zoro/estimators.hpp"
#include "zoro/problems.hpp"
#include "zoro/regularizers.hpp"

namespace zoro {

enum class StopStatus { iterations, budget, target, divergence, failure };

std::string to_string(StopStatus status);

struct SolverConfig {
  Index sparsity = 1;
  /// Defaults to 1/L; SPSA defaults to 1/(L (1 + (d-1)/batch)), the step
  /// that maximizes expected descent for a Rademacher random-search estimate.
  std::optional<double> step_size;
  /// Defaults to default_delta(sigma, H, max(1, ||x0||_inf)).
  std::optional<double> delta;
  double b1 = 4.0;
  EstimatorKind estimator = EstimatorKind::zoro_fixed;
  double phi = 0.3;
  Index stage1_extra = 0;
  int cosamp_iterations = 10;
  /// Seed CoSaMP with the previous estimate instead of zero.
  bool warm_start = false;
  int spsa_batch = 1;

  int max_iterations = 100;
  std::optional<std::uint64_t> query_budget;
  /// Stop once the median of three oracle samples of F(x_k) is <= target.
  /// The samples are charged to the ledger.
  std::optional<double> target_value;
  /// Experimenter-side stop: F(x_k) - f* <= threshold using the noise-free
  /// objective. Costs no queries; needs the problem's optimum value. Checked
  /// after each estimation round, never at x0.
  std::optional<double> error_threshold;
  /// Halve the step after three consecutive increases of the base oracle
  /// value E_f(x_k).
  bool backtracking = false;

  Seed seed = 0;
};

struct IterationRecord {
  int iteration = 0;
  std::uint64_t queries = 0;
  double objective = 0.0;        // noise-free F(x_k) = f(x_k) + r(x_k)
  double objective_error = 0.0;  // F(x_k) - f*, NaN when f* is unknown
  double grad_norm = 0.0;        // ||g_hat_{k-1}||; 0 for the initial record
  Index support_size = 0;
  double step_norm = 0.0;        // ||x_k - x_{k-1}||
};

struct RunTrace {
  std::vector<IterationRecord> records;
  StopStatus status = StopStatus::iterations;
  std::string message;
  std::uint64_t total_queries = 0;
  double step_size = 0.0;
  double delta = 0.0;
  Index directions = 0;
};

struct RunResult {
  Vector x;
  RunTrace trace;
};

/// 2 sqrt(sigma / H); for sigma == 0 the fallback 1e-4 * max(1, scale).
/// Throws ContractViolation when H <= 0 or sigma < 0.
double default_delta(double sigma, double hessian_bound, double scale = 1.0);

/// ceil(b1 s ln(d/s)) clamped to [s + 1, d]; returns d when s >= d.
Index default_m(Index sparsity, Index dimension, double b1 = 4.0);

/// Proximal zeroth-order descent x_{k+1} = prox_{alpha r}(x_k - alpha g_hat_k).
///
/// Sensing directions are drawn once per run. The opportunistic estimator
/// seeds its support with one fixed-sparsity round. Stops on the first of:
/// max_iterations, budget, target / error threshold, divergence
/// (F > 1e6 (1 + |F(x0)|) or non-finite). An oracle failure ends the run with
/// status `failure` and the trace so far.
RunResult zoro_run(const ProblemSpec& problem, NoiseModel& noise, const Regularizer& reg,
                   const Vector& x0, const SolverConfig& cfg);

/// Same, charging queries to a caller-owned ledger.
RunResult zoro_run(const ProblemSpec& problem, QueryLedger& ledger, NoiseModel& noise,
                   const Regularizer& reg, const Vector& x0, const SolverConfig& cfg);

}  // namespace zoro
