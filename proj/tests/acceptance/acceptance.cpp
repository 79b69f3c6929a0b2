// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "zoro/assets.hpp"
#include "zoro/experiment.hpp"
#include "zoro/log.hpp"

namespace fs = std::filesystem;
using namespace zoro;

namespace {

// Tolerances.
constexpr double kC1RelError = 1e-6;
constexpr double kC1SuccessRate = 0.95;
constexpr double kC2ResidualFactor = 1.01;
constexpr double kC2SuccessRate = 0.90;
constexpr double kC2AbsoluteFloor = 1e-10;
constexpr double kC3SlopeLow = 0.8;
constexpr double kC3SlopeHigh = 1.2;
constexpr double kC3DeltaFactor = 3.0;
constexpr double kC4FdsaFactor = 3.0;
constexpr double kC4SpsaFactor = 1.5;
constexpr double kC5MinRSquared = 0.95;
constexpr double kC5Delta = 1e-8;
constexpr double kC6RatioLow = 3.0;
constexpr double kC6RatioHigh = 33.0;
constexpr double kC8ZoroGrowth = 1.6;
constexpr double kC8SpsaGrowth = 1.8;
constexpr double kC9RiskFactor = 1.5;
constexpr double kC10Converged = 1e-8;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("zoro_acceptance_" + name);
  fs::remove_all(dir);
  return dir;
}

Vector random_sparse(Index d, Index s, Rng& rng) {
  Vector g = Vector::Zero(d);
  Index placed = 0;
  while (placed < s) {
    const auto i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(d)));
    if (g[i] != 0.0) continue;
    g[i] = rng.normal();
    if (g[i] != 0.0) ++placed;
  }
  return g;
}

Outcome c1_cosamp_recovery() {
  const Index d = 200, s = 10;
  const Index m = static_cast<Index>(std::ceil(4.0 * 10.0 * std::log(20.0)));
  int ok = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(101, static_cast<std::uint64_t>(t)));
    const Vector g = random_sparse(d, s, rng);
    const DirectionSet dirs(m, d, derive_seed(102, static_cast<std::uint64_t>(t)));
    const Matrix Z = dirs.matrix() / std::sqrt(static_cast<double>(m));
    CosampConfig cfg;
    cfg.sparsity = s;
    cfg.max_iterations = 20;
    const SparseSolution sol = cosamp(Z, Z * g, cfg);
    if ((sol.values - g).norm() <= kC1RelError * g.norm()) ++ok;
  }
  const double rate = static_cast<double>(ok) / trials;
  return {rate >= kC1SuccessRate,
          "m=" + std::to_string(m) + " recovered " + std::to_string(ok) + "/" + std::to_string(trials)};
}

Outcome c2_brute_force() {
  int ok = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(201, static_cast<std::uint64_t>(t)));
    const Index d = 6 + static_cast<Index>(rng.below(7));
    const Index s = 1 + static_cast<Index>(rng.below(3));
    const Index m = default_m(s, d);
    const DirectionSet dirs(m, d, derive_seed(202, static_cast<std::uint64_t>(t)));
    const Matrix Z = dirs.matrix() / std::sqrt(static_cast<double>(m));
    const Vector y = Z * random_sparse(d, s, rng);
    CosampConfig cfg;
    cfg.sparsity = s;
    cfg.max_iterations = 20;
    const double greedy = cosamp(Z, y, cfg).residual_norm;
    const double exhaustive = zoro::testing::brute_force_sparse_ls(Z, y, s).residual;
    if (greedy <= kC2ResidualFactor * exhaustive + kC2AbsoluteFloor * y.norm()) ++ok;
  }
  const double rate = static_cast<double>(ok) / trials;
  return {rate >= kC2SuccessRate, "within factor in " + std::to_string(ok) + "/" + std::to_string(trials)};
}

double mean_estimator_error(ProblemSpec& problem, double sigma, double delta, int trials,
                            Seed seed) {
  const Index d = problem.dimension();
  const Index s = 20;
  double total = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    Vector x(d);
    for (Index i = 0; i < d; ++i) x[i] = rng.normal();
    x /= x.norm();
    QueryLedger ledger;
    NoiseModel noise = sigma > 0.0 ? NoiseModel::uniform(sigma, derive_seed(seed + 1, static_cast<std::uint64_t>(t)))
                                   : NoiseModel::none();
    Oracle oracle(problem, ledger, noise);
    const DirectionSet dirs(default_m(s, d), d, derive_seed(seed + 2, static_cast<std::uint64_t>(t)));
    const GradientEstimate est = estimate_gradient(oracle, x, s, delta, dirs);
    total += (est.g_hat - problem.true_gradient(x)).norm();
  }
  return total / trials;
}

Outcome c3_error_law() {
  ProblemSpec problem = make_sparse_quadratic(200, 20, 301);
  std::vector<double> log_delta, log_err;
  for (int i = 0; i < 5; ++i) {
    const double delta = std::pow(10.0, -5.0 + i);
    log_delta.push_back(std::log(delta));
    log_err.push_back(std::log(mean_estimator_error(problem, 0.0, delta, 5, 302)));
  }
  const double slope = zoro::testing::fit_line(log_delta, log_err).slope;

  const double sigma = 1e-4;
  problem.set_noise_bound(sigma);
  const double predicted = default_delta(sigma, problem.hessian_l1_bound());
  double best_delta = 0.0;
  double best_err = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 24; ++i) {
    const double delta = predicted * std::pow(10.0, -2.0 + i / 6.0);
    const double err = mean_estimator_error(problem, sigma, delta, 20, 303);
    if (err < best_err) {
      best_err = err;
      best_delta = delta;
    }
  }
  const double ratio = best_delta / predicted;
  const bool pass = slope >= kC3SlopeLow && slope <= kC3SlopeHigh && ratio <= kC3DeltaFactor &&
                    ratio >= 1.0 / kC3DeltaFactor;
  return {pass, "slope=" + fmt(slope) + " argmin/predicted=" + fmt(ratio)};
}

ExperimentSpec sparse_experiment() {
  ExperimentSpec spec;
  spec.name = "query_ordering";
  spec.problem.kind = "sparse_quadratic";
  spec.problem.dimension = 200;
  spec.problem.sparsity = 20;
  spec.regularizer.kind = "nonneg";
  spec.methods = {EstimatorKind::zoro_fixed, EstimatorKind::fdsa, EstimatorKind::spsa};
  spec.solver.sparsity = 20;
  spec.solver.max_iterations = 20000;
  spec.solver.query_budget = 200000;
  spec.threshold = 1e-3;
  spec.repetitions = 5;
  spec.seed = 401;
  return spec;
}

Outcome c4_query_ordering() {
  ExperimentSpec spec = sparse_experiment();
  spec.output_dir = scratch("c4");
  const ExperimentResult result = run_experiment(spec);
  std::map<EstimatorKind, double> mean;
  for (const auto& c : result.cells) {
    mean[c.method] += static_cast<double>(c.reported_queries) / spec.repetitions;
  }
  const double zoro = mean[EstimatorKind::zoro_fixed];
  const double fdsa = mean[EstimatorKind::fdsa];
  const double spsa = mean[EstimatorKind::spsa];
  const bool pass = zoro <= fdsa / kC4FdsaFactor && zoro <= spsa / kC4SpsaFactor;
  return {pass, "mean queries zoro=" + fmt(zoro) + " fdsa=" + fmt(fdsa) + " spsa=" + fmt(spsa) +
                    " fdsa/zoro=" + fmt(fdsa / zoro) + " spsa/zoro=" + fmt(spsa / zoro)};
}

Outcome c5_linear_convergence() {
  const ProblemSpec problem = make_sparse_quadratic(200, 20, 501);
  Rng rng(502);
  Vector x0(200);
  for (Index i = 0; i < 200; ++i) x0[i] = rng.normal();
  x0 /= x0.norm();
  SolverConfig cfg;
  cfg.sparsity = 20;
  cfg.max_iterations = 400;
  cfg.delta = kC5Delta;
  cfg.seed = 503;
  NoiseModel noise;
  const RunResult r = zoro_run(problem, noise, Regularizer::zero(), x0, cfg);
  const double e0 = r.trace.records.front().objective_error;
  std::vector<double> k, log_e;
  for (const auto& rec : r.trace.records) {
    const double e = rec.objective_error;
    if (e >= 1e-10 && e <= e0 / 10.0) {
      k.push_back(rec.iteration);
      log_e.push_back(std::log(e));
    }
  }
  if (k.size() < 3) return {false, "only " + std::to_string(k.size()) + " records in segment"};
  const auto fit = zoro::testing::fit_line(k, log_e);
  return {fit.slope < 0.0 && fit.r_squared >= kC5MinRSquared,
          "points=" + std::to_string(k.size()) + " slope=" + fmt(fit.slope) + " R2=" + fmt(fit.r_squared)};
}

Outcome c6_error_horizon() {
  const ProblemSpec base = make_sparse_quadratic(200, 20, 601);
  Rng rng(602);
  Vector x0(200);
  for (Index i = 0; i < 200; ++i) x0[i] = rng.normal();
  x0 /= x0.norm();
  std::vector<double> plateaus;
  for (double sigma : {1e-6, 1e-4, 1e-2}) {
    ProblemSpec problem = base;
    problem.set_noise_bound(sigma);
    NoiseModel noise = NoiseModel::adversarial(sigma);
    SolverConfig cfg;
    cfg.sparsity = 20;
    cfg.max_iterations = 300;
    cfg.seed = 603;
    const RunResult r = zoro_run(problem, noise, Regularizer::zero(), x0, cfg);
    const auto& recs = r.trace.records;
    std::vector<double> tail;
    for (std::size_t i = recs.size() - recs.size() / 5; i < recs.size(); ++i) {
      tail.push_back(recs[i].objective_error);
    }
    plateaus.push_back(zoro::testing::median(tail));
  }
  const double r1 = plateaus[1] / plateaus[0];
  const double r2 = plateaus[2] / plateaus[1];
  const bool pass = plateaus[0] < plateaus[1] && plateaus[1] < plateaus[2] && r1 >= kC6RatioLow &&
                    r1 <= kC6RatioHigh && r2 >= kC6RatioLow && r2 <= kC6RatioHigh;
  return {pass, "plateaus=" + fmt(plateaus[0]) + "," + fmt(plateaus[1]) + "," + fmt(plateaus[2]) +
                    " ratios=" + fmt(r1) + "," + fmt(r2)};
}

Outcome c7_opportunistic_exit() {
  Vector diagonal = Vector::Zero(100);
  for (Index i : {3, 17, 42, 58, 91}) diagonal[i] = 2.0;
  const ProblemSpec problem = make_diagonal_quadratic(diagonal, "fixed_support");
  Rng rng(702);
  Vector x0(100);
  for (Index i = 0; i < 100; ++i) x0[i] = rng.normal();
  x0 /= x0.norm();
  SolverConfig cfg;
  cfg.sparsity = 5;
  cfg.estimator = EstimatorKind::zoro_opportunistic;
  cfg.max_iterations = 30;
  cfg.seed = 703;
  NoiseModel noise;
  const RunResult r = zoro_run(problem, noise, Regularizer::zero(), x0, cfg);
  const auto& recs = r.trace.records;
  int bad = 0;
  std::uint64_t worst = 0;
  for (std::size_t k = 2; k < recs.size(); ++k) {
    const std::uint64_t cost = recs[k].queries - recs[k - 1].queries;
    if (cost != 6) {
      ++bad;
      worst = std::max(worst, cost);
    }
  }
  const bool pass = bad == 0 && recs.size() > 3;
  return {pass, "rounds checked=" + std::to_string(recs.size() > 2 ? recs.size() - 2 : 0) +
                    " off-target=" + std::to_string(bad) +
                    (bad ? " max cost=" + std::to_string(worst) : "")};
}

ExperimentSpec max_k_experiment() {
  ExperimentSpec spec;
  spec.name = "dimension_sweep";
  spec.problem.kind = "max_k_squared_sum";
  spec.problem.k = 20;
  spec.methods = {EstimatorKind::zoro_fixed, EstimatorKind::spsa};
  spec.solver.sparsity = 20;
  spec.solver.max_iterations = 100000;
  spec.solver.query_budget = 400000;
  spec.repetitions = 5;
  spec.seed = 801;
  return spec;
}

std::map<std::string, std::vector<double>> sweep_means(const CsvTable& table) {
  std::map<std::string, std::vector<double>> means;
  std::istringstream in(table.text());
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string x;
    while (std::getline(ls, x, ',')) f.push_back(x);
    means[f[1]].push_back(std::stod(f[2]));
  }
  return means;
}

Outcome c8_dimension_sweep() {
  const CsvTable table = dimension_sweep(max_k_experiment(), {64, 128, 256}, 1e-3);
  auto means = sweep_means(table);
  const auto& z = means["zoro_fixed"];
  const auto& p = means["spsa"];
  const double z1 = z[1] / z[0], z2 = z[2] / z[1];
  const double p1 = p[1] / p[0], p2 = p[2] / p[1];
  const bool pass = z1 <= kC8ZoroGrowth && z2 <= kC8ZoroGrowth && p1 >= kC8SpsaGrowth &&
                    p2 >= kC8SpsaGrowth;
  return {pass, "zoro means=" + fmt(z[0]) + "," + fmt(z[1]) + "," + fmt(z[2]) + " growth=" + fmt(z1) +
                    "," + fmt(z2) + "; spsa means=" + fmt(p[0]) + "," + fmt(p[1]) + "," + fmt(p[2]) +
                    " growth=" + fmt(p1) + "," + fmt(p2)};
}

ExperimentSpec portfolio_experiment() {
  ExperimentSpec spec;
  spec.name = "portfolio";
  spec.problem.kind = "portfolio";
  spec.problem.dimension = 225;
  spec.problem.lambda = 10.0;
  spec.regularizer.kind = "nonneg";
  spec.start.kind = "constant";
  spec.start.value = 1.0 / 225.0;
  spec.methods = {EstimatorKind::zoro_opportunistic};
  spec.solver.sparsity = 20;
  spec.solver.stage1_extra = 5;
  spec.solver.max_iterations = 4000;
  spec.solver.query_budget = 50000;
  spec.stop_at_threshold = false;
  spec.seed = 7;
  return spec;
}

Outcome c9_portfolio() {
  const ExperimentSpec spec = portfolio_experiment();
  const CellResult cell = run_cell(spec, EstimatorKind::zoro_opportunistic, 0);
  const ProblemSpec problem = build_problem(spec.problem, derive_seed(derive_seed(spec.seed, 0), 0));
  const Vector ref = zoro::testing::simplex_descent(
      [&](const Vector& x) { return problem.true_gradient(x); }, Vector::Constant(225, 1.0 / 225.0),
      5.0 * problem.lipschitz(), 20000);
  const double reference = problem.value(ref);
  const double risk = problem.value(cell.run.x);
  const double ratio = risk / reference;
  return {ratio <= kC9RiskFactor, "final=" + fmt(risk) + " reference=" + fmt(reference) +
                                      " ratio=" + fmt(ratio) + " queries=" +
                                      std::to_string(cell.run.trace.total_queries)};
}

Outcome c10_huber() {
  HuberDemoConfig noisy;
  noisy.m = 0.1;
  noisy.sigma = 0.02;
  const RunResult a = huber_divergence_demo(noisy);
  const double f0 = a.trace.records.front().objective;
  const double fa = a.trace.records.back().objective;
  HuberDemoConfig clean = noisy;
  clean.sigma = 0.0;
  const RunResult b = huber_divergence_demo(clean);
  const double fb = b.trace.records.back().objective;
  const bool pass = (a.trace.status == StopStatus::divergence || fa >= f0) && fb < kC10Converged;
  return {pass, "noisy status=" + to_string(a.trace.status) + " F0=" + fmt(f0) + " final=" + fmt(fa) +
                    "; noiseless final=" + fmt(fb)};
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[entry.path().filename().string()] = ss.str();
  }
  return files;
}

Outcome c11_determinism() {
  std::vector<ExperimentSpec> specs;
  specs.push_back(sparse_experiment());
  specs.back().repetitions = 2;
  specs.back().noise = {NoiseKind::uniform_bounded, 1e-6};
  specs.back().methods.push_back(EstimatorKind::zoro_opportunistic);
  specs.push_back(portfolio_experiment());
  specs.back().solver.query_budget = 5000;
  int compared = 0, differing = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    ExperimentSpec spec = specs[i];
    spec.output_dir = scratch("c11_" + std::to_string(i) + "_a");
    run_experiment(spec);
    const auto first = read_dir(spec.output_dir);
    spec.output_dir = scratch("c11_" + std::to_string(i) + "_b");
    run_experiment(spec);
    const auto second = read_dir(spec.output_dir);
    for (const auto& [name, bytes] : first) {
      ++compared;
      const auto it = second.find(name);
      if (it == second.end() || it->second != bytes) ++differing;
    }
  }
  ExperimentSpec sweep = max_k_experiment();
  sweep.repetitions = 2;
  ++compared;
  if (dimension_sweep(sweep, {32, 64}, 1e-3).text() != dimension_sweep(sweep, {32, 64}, 1e-3).text()) {
    ++differing;
  }
  return {differing == 0 && compared > 2,
          "files compared=" + std::to_string(compared) + " differing=" + std::to_string(differing)};
}

}  // namespace

int main() {
  set_warning_handler({});
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"C1 cosamp exact recovery", c1_cosamp_recovery},
      {"C2 brute-force equivalence", c2_brute_force},
      {"C3 estimator error law", c3_error_law},
      {"C4 query-efficiency ordering", c4_query_ordering},
      {"C5 linear convergence", c5_linear_convergence},
      {"C6 error horizon scaling", c6_error_horizon},
      {"C7 opportunistic early exit", c7_opportunistic_exit},
      {"C8 dimension sweep", c8_dimension_sweep},
      {"C9 portfolio risk", c9_portfolio},
      {"C10 huber adversarial demo", c10_huber},
      {"C11 determinism", c11_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failed;
    std::printf("%s %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", name.c_str(), out.detail.c_str(),
                seconds);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
