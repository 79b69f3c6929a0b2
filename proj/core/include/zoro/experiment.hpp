#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zoro/csv.hpp"
#include "zoro/solver.hpp"

namespace zoro {

/// Which benchmark objective to build. Fields irrelevant to `kind` are ignored.
///
/// kinds: sparse_quadratic, compressible_quadratic, max_k_squared_sum,
/// rotated_sparse_quadratic, portfolio, huber.
struct ProblemDescriptor {
  std::string kind = "sparse_quadratic";
  Index dimension = 200;
  Index sparsity = 20;
  double omega = 0.5;
  Index k = 20;
  double density = 0.1;
  double lambda = 10.0;
  /// Portfolio return floor; defaults to the 75th percentile of the means.
  std::optional<double> min_return;
  /// Portfolio data directory; a seeded synthetic table when absent.
  std::optional<std::filesystem::path> asset_dir;
  double huber_m = 0.1;
  /// Replaces the problem's f* (needed for F_err on the portfolio).
  std::optional<double> optimum_value;
};

struct RegularizerDescriptor {
  std::string kind = "none";  // none, nonneg, box, l1
  double lambda = 0.0;
  double lower = 0.0;
  double upper = 1.0;
};

struct NoiseDescriptor {
  NoiseKind kind = NoiseKind::none;
  double sigma = 0.0;
};

struct StartDescriptor {
  std::string kind = "random_unit";  // random_unit, constant
  double value = 1.0;
};

struct ExperimentSpec {
  std::string name = "experiment";
  ProblemDescriptor problem;
  std::vector<EstimatorKind> methods;
  RegularizerDescriptor regularizer;
  NoiseDescriptor noise;
  StartDescriptor start;
  SolverConfig solver;
  /// Queries-to-threshold target as a fraction of the initial error F_err(x0).
  double threshold = 1e-3;
  bool stop_at_threshold = true;
  int repetitions = 1;
  Seed seed = 0;
  std::filesystem::path output_dir = "out";
};

/// Throws ConfigError on repetitions < 1, an empty method list, a missing
/// asset directory or an unknown problem / regularizer / start kind.
void validate(const ExperimentSpec& spec);

/// Reads the YAML grammar documented in docs/config.md. Relative paths are
/// resolved against the directory of `path`. Unknown keys are rejected.
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);
ExperimentSpec parse_experiment_spec(std::string_view text,
                                     const std::filesystem::path& base_dir = ".");

ProblemSpec build_problem(const ProblemDescriptor& desc, Seed seed);
Regularizer build_regularizer(const RegularizerDescriptor& desc, Index dimension);
NoiseModel build_noise(const NoiseDescriptor& desc, Seed seed);
Vector build_start(const StartDescriptor& desc, const ProblemSpec& problem, Seed seed);

/// Columns iter,queries,F,F_err,grad_norm,support_size,step_norm.
CsvTable trace_table(const RunTrace& trace);

/// Queries at the first record after x0 with F_err <= threshold.
std::optional<std::uint64_t> queries_to_threshold(const RunTrace& trace, double threshold);

struct CellResult {
  EstimatorKind method = EstimatorKind::zoro_fixed;
  int repetition = 0;
  RunResult run;
  double threshold = 0.0;  // absolute, NaN when f* is unknown
  std::optional<std::uint64_t> queries_to_threshold;
  /// Queries reported for the cell: queries_to_threshold, or the budget when
  /// censored (total queries when no budget is set).
  std::uint64_t reported_queries = 0;
  bool censored() const noexcept { return !queries_to_threshold.has_value(); }
};

/// One solver run. Streams: derive_seed(seed, repetition) then 0 = problem,
/// 1 = start point, 2 = noise, 3 = solver.
CellResult run_cell(const ExperimentSpec& spec, EstimatorKind method, int repetition);

struct ExperimentResult {
  std::vector<CellResult> cells;
  std::vector<std::filesystem::path> files;
};

/// Writes <out>/<method>_rep<r>.csv per cell and <out>/summary.csv.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Columns method,repetition,queries_to_threshold,censored,total_queries,final_F,final_F_err,status.
CsvTable summary_table(const std::vector<CellResult>& cells);

/// Per (dimension, method): mean and sample standard deviation of the
/// reported queries over spec.repetitions. Columns
/// dimension,method,mean_queries,std_queries,censored_runs,repetitions.
/// `threshold` overrides spec.threshold.
CsvTable dimension_sweep(const ExperimentSpec& base_spec, const std::vector<Index>& dims,
                         double threshold);

struct CompressibilityReport {
  CsvTable decay{{"point", "rank", "ratio"}};
  /// Least-squares slope of log ratio against log rank over nonzero ratios,
  /// and p = -1 / slope.
  double slope = 0.0;
  double exponent = 0.0;
  Index points_used = 0;
  Index points_skipped = 0;
  std::vector<std::string> notes;

  CsvTable summary() const;
};

/// Sorted |g|(i) / ||g||_2 at each point. Uses the exact gradient when the
/// problem has one, otherwise noise-free forward differences. Points where
/// the gradient vanishes or f is undefined are skipped with a note.
CompressibilityReport compressibility_report(const ProblemSpec& problem,
                                             const std::vector<Vector>& points);

/// Same at n_points random unit vectors.
CompressibilityReport compressibility_report(const ProblemSpec& problem, int n_points, Seed seed);

struct HuberDemoConfig {
  double m = 0.1;
  double sigma = 0.02;
  double x0 = 1.0;
  int max_iterations = 200;
  Seed seed = 0;
};

/// ZORO on the one-dimensional Huber loss with adversarial_sign noise of
/// bound sigma (no noise when sigma == 0).
RunResult huber_divergence_demo(const HuberDemoConfig& cfg);

}  // namespace zoro
