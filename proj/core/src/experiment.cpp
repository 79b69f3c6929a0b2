#include "zoro/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zoro/assets.hpp"

namespace zoro {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string>& problem_kinds() {
  static const std::vector<std::string> kinds = {
      "sparse_quadratic",         "compressible_quadratic", "max_k_squared_sum",
      "rotated_sparse_quadratic", "portfolio",              "huber"};
  return kinds;
}

bool one_of(const std::string& value, std::initializer_list<const char*> options) {
  return std::any_of(options.begin(), options.end(),
                     [&value](const char* o) { return value == o; });
}

std::string cell_file_name(EstimatorKind method, int repetition) {
  return to_string(method) + "_rep" + std::to_string(repetition) + ".csv";
}

}  // namespace

void validate(const ExperimentSpec& spec) {
  if (spec.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (spec.methods.empty()) throw ConfigError("method list is empty");
  const auto& kinds = problem_kinds();
  if (std::find(kinds.begin(), kinds.end(), spec.problem.kind) == kinds.end()) {
    throw ConfigError("unknown problem kind '" + spec.problem.kind + "'");
  }
  if (spec.problem.asset_dir && !std::filesystem::is_directory(*spec.problem.asset_dir)) {
    throw ConfigError("asset directory not found: " + spec.problem.asset_dir->string());
  }
  if (!one_of(spec.regularizer.kind, {"none", "nonneg", "box", "l1"})) {
    throw ConfigError("unknown regularizer kind '" + spec.regularizer.kind + "'");
  }
  if (!one_of(spec.start.kind, {"random_unit", "constant"})) {
    throw ConfigError("unknown start kind '" + spec.start.kind + "'");
  }
  if (!(spec.noise.sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  if (!(spec.threshold > 0.0)) throw ConfigError("threshold must be > 0");
}

ProblemSpec build_problem(const ProblemDescriptor& desc, Seed seed) {
  auto with_optimum = [&desc](ProblemSpec p) {
    if (desc.optimum_value) p.set_optimum_value(desc.optimum_value);
    return p;
  };
  if (desc.kind == "sparse_quadratic") {
    return with_optimum(make_sparse_quadratic(desc.dimension, desc.sparsity, seed));
  }
  if (desc.kind == "compressible_quadratic") {
    return with_optimum(make_compressible_quadratic(desc.dimension, desc.omega));
  }
  if (desc.kind == "max_k_squared_sum") {
    return with_optimum(make_max_k_squared_sum(desc.dimension, desc.k));
  }
  if (desc.kind == "rotated_sparse_quadratic") {
    return with_optimum(make_rotated_sparse_quadratic(desc.dimension, desc.density, seed));
  }
  if (desc.kind == "portfolio") {
    const AssetTable assets = desc.asset_dir ? load_asset_table(*desc.asset_dir)
                                             : make_synthetic_assets(desc.dimension, seed);
    double floor = 0.0;
    if (desc.min_return) {
      floor = *desc.min_return;
    } else {
      std::vector<double> means(assets.means.data(), assets.means.data() + assets.size());
      std::sort(means.begin(), means.end());
      floor = means[means.size() * 3 / 4];
    }
    return make_portfolio_oracle(assets, desc.lambda, floor, desc.optimum_value);
  }
  if (desc.kind == "huber") {
    return with_optimum(make_huber_demo(desc.huber_m, 0.0));
  }
  throw ConfigError("unknown problem kind '" + desc.kind + "'");
}

Regularizer build_regularizer(const RegularizerDescriptor& desc, Index dimension) {
  if (desc.kind == "none") return Regularizer::zero();
  if (desc.kind == "nonneg") return Regularizer::nonneg();
  if (desc.kind == "l1") return Regularizer::l1(desc.lambda);
  if (desc.kind == "box") {
    return Regularizer::box(Vector::Constant(dimension, desc.lower),
                            Vector::Constant(dimension, desc.upper));
  }
  throw ConfigError("unknown regularizer kind '" + desc.kind + "'");
}

NoiseModel build_noise(const NoiseDescriptor& desc, Seed seed) {
  switch (desc.kind) {
    case NoiseKind::none:
      return NoiseModel::none();
    case NoiseKind::uniform_bounded:
      return NoiseModel::uniform(desc.sigma, seed);
    case NoiseKind::adversarial_sign:
      return NoiseModel::adversarial(desc.sigma);
  }
  return NoiseModel::none();
}

Vector build_start(const StartDescriptor& desc, const ProblemSpec& problem, Seed seed) {
  const Index d = problem.dimension();
  if (desc.kind == "constant") return Vector::Constant(d, desc.value);
  if (desc.kind == "random_unit") {
    Rng rng(seed);
    Vector x(d);
    for (Index i = 0; i < d; ++i) x[i] = rng.normal();
    return x / x.norm();
  }
  throw ConfigError("unknown start kind '" + desc.kind + "'");
}

CsvTable trace_table(const RunTrace& trace) {
  CsvTable table({"iter", "queries", "F", "F_err", "grad_norm", "support_size", "step_norm"});
  for (const auto& r : trace.records) {
    table.row({std::to_string(r.iteration), std::to_string(r.queries), format_double(r.objective),
               format_double(r.objective_error), format_double(r.grad_norm),
               std::to_string(r.support_size), format_double(r.step_norm)});
  }
  return table;
}

std::optional<std::uint64_t> queries_to_threshold(const RunTrace& trace, double threshold) {
  for (const auto& r : trace.records) {
    if (r.iteration >= 1 && r.objective_error <= threshold) return r.queries;
  }
  return std::nullopt;
}

CellResult run_cell(const ExperimentSpec& spec, EstimatorKind method, int repetition) {
  const Seed rep_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(repetition));
  ProblemSpec problem = build_problem(spec.problem, derive_seed(rep_seed, 0));
  problem.set_noise_bound(std::max(problem.noise_bound(), spec.noise.sigma));
  const Regularizer reg = build_regularizer(spec.regularizer, problem.dimension());
  NoiseModel noise = build_noise(spec.noise, derive_seed(rep_seed, 2));
  const Vector x0 = build_start(spec.start, problem, derive_seed(rep_seed, 1));

  SolverConfig cfg = spec.solver;
  cfg.estimator = method;
  cfg.seed = derive_seed(rep_seed, 3);

  CellResult cell;
  cell.method = method;
  cell.repetition = repetition;
  cell.threshold = kNaN;
  if (problem.optimum_value()) {
    const double f0 = problem.value(x0);
    const double r0 = reg.value(x0);
    const double e0 = (std::isfinite(r0) ? f0 + r0 : f0) - *problem.optimum_value();
    cell.threshold = spec.threshold * e0;
    if (spec.stop_at_threshold) cfg.error_threshold = cell.threshold;
  }

  cell.run = zoro_run(problem, noise, reg, x0, cfg);
  cell.queries_to_threshold = queries_to_threshold(cell.run.trace, cell.threshold);
  cell.reported_queries = cell.queries_to_threshold
                              ? *cell.queries_to_threshold
                              : cfg.query_budget.value_or(cell.run.trace.total_queries);
  return cell;
}

CsvTable summary_table(const std::vector<CellResult>& cells) {
  CsvTable table({"method", "repetition", "queries_to_threshold", "censored", "total_queries",
                  "final_F", "final_F_err", "status"});
  for (const auto& c : cells) {
    const auto& last = c.run.trace.records.back();
    table.row({to_string(c.method), std::to_string(c.repetition),
               std::to_string(c.reported_queries), c.censored() ? "true" : "false",
               std::to_string(c.run.trace.total_queries), format_double(last.objective),
               format_double(last.objective_error), to_string(c.run.trace.status)});
  }
  return table;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  std::error_code ec;
  std::filesystem::create_directories(spec.output_dir, ec);
  if (ec) throw IoError(spec.output_dir.string() + ": " + ec.message());

  ExperimentResult result;
  for (int rep = 0; rep < spec.repetitions; ++rep) {
    for (EstimatorKind method : spec.methods) {
      CellResult cell = run_cell(spec, method, rep);
      const auto path = spec.output_dir / cell_file_name(method, rep);
      trace_table(cell.run.trace).save(path);
      result.files.push_back(path);
      result.cells.push_back(std::move(cell));
    }
  }
  const auto summary_path = spec.output_dir / "summary.csv";
  summary_table(result.cells).save(summary_path);
  result.files.push_back(summary_path);
  return result;
}

CsvTable dimension_sweep(const ExperimentSpec& base_spec, const std::vector<Index>& dims,
                         double threshold) {
  if (dims.empty()) throw ConfigError("dimension list is empty");
  for (Index d : dims) {
    if (d < 2) throw ConfigError("sweep dimensions must be >= 2");
  }
  ExperimentSpec spec = base_spec;
  spec.threshold = threshold;
  validate(spec);

  CsvTable table(
      {"dimension", "method", "mean_queries", "std_queries", "censored_runs", "repetitions"});
  for (Index d : dims) {
    spec.problem.dimension = d;
    spec.seed = derive_seed(base_spec.seed, static_cast<std::uint64_t>(d));
    for (EstimatorKind method : spec.methods) {
      std::vector<double> queries;
      int censored = 0;
      for (int rep = 0; rep < spec.repetitions; ++rep) {
        const CellResult cell = run_cell(spec, method, rep);
        queries.push_back(static_cast<double>(cell.reported_queries));
        censored += cell.censored() ? 1 : 0;
      }
      const double n = static_cast<double>(queries.size());
      double mean = 0.0;
      for (double q : queries) mean += q;
      mean /= n;
      double var = 0.0;
      for (double q : queries) var += (q - mean) * (q - mean);
      const double stddev = queries.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
      table.row({std::to_string(d), to_string(method), format_double(mean), format_double(stddev),
                 std::to_string(censored), std::to_string(spec.repetitions)});
    }
  }
  return table;
}

CsvTable CompressibilityReport::summary() const {
  CsvTable table({"points_used", "points_skipped", "slope", "exponent"});
  table.row({std::to_string(points_used), std::to_string(points_skipped), format_double(slope),
             format_double(exponent)});
  return table;
}

CompressibilityReport compressibility_report(const ProblemSpec& problem,
                                             const std::vector<Vector>& points) {
  CompressibilityReport report;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double count = 0.0;
  for (std::size_t p = 0; p < points.size(); ++p) {
    Vector g;
    try {
      if (problem.has_true_gradient()) {
        g = problem.true_gradient(points[p]);
      } else {
        QueryLedger ledger;
        NoiseModel quiet = NoiseModel::none();
        Oracle oracle(problem, ledger, quiet);
        const double delta = 1e-6 * std::max(1.0, points[p].lpNorm<Eigen::Infinity>());
        g = fdsa_gradient(oracle, points[p], delta).g_hat;
      }
    } catch (const DomainError& e) {
      ++report.points_skipped;
      report.notes.push_back("point " + std::to_string(p) + ": " + e.what());
      continue;
    } catch (const EvaluationFailure& e) {
      ++report.points_skipped;
      report.notes.push_back("point " + std::to_string(p) + ": " + e.what());
      continue;
    }
    const double norm = g.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      ++report.points_skipped;
      report.notes.push_back("point " + std::to_string(p) + ": zero gradient, skipped");
      continue;
    }
    std::vector<double> mags(static_cast<std::size_t>(g.size()));
    for (Index i = 0; i < g.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(g[i]) / norm;
    std::sort(mags.begin(), mags.end(), std::greater<>());
    for (std::size_t i = 0; i < mags.size(); ++i) {
      report.decay.row({std::to_string(report.points_used), std::to_string(i + 1),
                        format_double(mags[i])});
      if (mags[i] > 0.0) {
        const double lx = std::log(static_cast<double>(i + 1));
        const double ly = std::log(mags[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        count += 1.0;
      }
    }
    ++report.points_used;
  }
  const double denom = count * sxx - sx * sx;
  if (count >= 2.0 && denom > 0.0) {
    report.slope = (count * sxy - sx * sy) / denom;
    report.exponent = report.slope < 0.0 ? -1.0 / report.slope
                                         : std::numeric_limits<double>::infinity();
  } else {
    report.slope = kNaN;
    report.exponent = kNaN;
    report.notes.push_back("not enough nonzero ranks to fit an exponent");
  }
  return report;
}

CompressibilityReport compressibility_report(const ProblemSpec& problem, int n_points, Seed seed) {
  if (n_points < 1) throw ContractViolation("compressibility report needs n_points >= 1");
  Rng rng(seed);
  std::vector<Vector> points;
  points.reserve(static_cast<std::size_t>(n_points));
  for (int p = 0; p < n_points; ++p) {
    Vector x(problem.dimension());
    for (Index i = 0; i < x.size(); ++i) x[i] = rng.normal();
    points.push_back(x / x.norm());
  }
  return compressibility_report(problem, points);
}

RunResult huber_divergence_demo(const HuberDemoConfig& cfg) {
  if (!(cfg.m > 0.0)) throw ContractViolation("Huber demo needs m > 0");
  if (!(cfg.sigma >= 0.0)) throw ContractViolation("Huber demo needs sigma >= 0");
  const ProblemSpec problem = make_huber_demo(cfg.m, cfg.sigma);
  NoiseModel noise = cfg.sigma > 0.0 ? NoiseModel::adversarial(cfg.sigma) : NoiseModel::none();
  SolverConfig solver;
  solver.sparsity = 1;
  solver.max_iterations = cfg.max_iterations;
  solver.seed = cfg.seed;
  return zoro_run(problem, noise, Regularizer::zero(), Vector::Constant(1, cfg.x0), solver);
}

}  // namespace zoro
