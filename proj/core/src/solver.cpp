#include "zoro/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

// GCC 11 reports a false positive on std::optional members of GradientEstimate.
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
#endif

namespace zoro {

namespace {

constexpr double kDivergenceFactor = 1e6;

double objective_of(const ProblemSpec& problem, const Regularizer& reg, const Vector& x) {
  const double f = problem.value(x);
  const double r = reg.value(x);
  // Indicator regularizers are infinite at an infeasible start; report f there.
  return std::isfinite(r) ? f + r : f;
}

double error_of(const ProblemSpec& problem, double objective) {
  const auto& f_star = problem.optimum_value();
  return f_star ? objective - *f_star : std::numeric_limits<double>::quiet_NaN();
}

void validate(const SolverConfig& cfg, Index d) {
  if (cfg.sparsity < 1) throw ContractViolation("solver sparsity must be >= 1");
  if (cfg.step_size && !(*cfg.step_size > 0.0)) throw ContractViolation("step size must be > 0");
  if (cfg.delta && !(*cfg.delta > 0.0)) throw ContractViolation("sampling radius must be > 0");
  if (!(cfg.b1 > 0.0)) throw ContractViolation("b1 must be > 0");
  if (cfg.max_iterations < 0) throw ContractViolation("max_iterations must be >= 0");
  if (cfg.spsa_batch < 1) throw ContractViolation("SPSA batch must be >= 1");
  if (cfg.estimator == EstimatorKind::zoro_opportunistic && !(cfg.phi > 0.0 && cfg.phi <= 1.0)) {
    throw ContractViolation("phi must lie in (0, 1]");
  }
  if (d < 1) throw ContractViolation("problem dimension must be >= 1");
}

}  // namespace

std::string to_string(StopStatus status) {
  switch (status) {
    case StopStatus::iterations:
      return "iterations";
    case StopStatus::budget:
      return "budget";
    case StopStatus::target:
      return "target";
    case StopStatus::divergence:
      return "divergence";
    case StopStatus::failure:
      return "failure";
  }
  return "unknown";
}

double default_delta(double sigma, double hessian_bound, double scale) {
  if (!(hessian_bound > 0.0)) throw ContractViolation("default_delta needs H > 0");
  if (!(sigma >= 0.0)) throw ContractViolation("default_delta needs sigma >= 0");
  if (sigma == 0.0) return 1e-4 * std::max(1.0, scale);
  return 2.0 * std::sqrt(sigma / hessian_bound);
}

Index default_m(Index sparsity, Index dimension, double b1) {
  if (sparsity < 1 || dimension < 1) throw ContractViolation("default_m needs s, d >= 1");
  if (sparsity >= dimension) return dimension;
  const double raw = b1 * static_cast<double>(sparsity) *
                     std::log(static_cast<double>(dimension) / static_cast<double>(sparsity));
  const auto m = static_cast<Index>(std::ceil(raw));
  return std::clamp(m, sparsity + 1, dimension);
}

RunResult zoro_run(const ProblemSpec& problem, NoiseModel& noise, const Regularizer& reg,
                   const Vector& x0, const SolverConfig& cfg) {
  QueryLedger ledger;
  return zoro_run(problem, ledger, noise, reg, x0, cfg);
}

RunResult zoro_run(const ProblemSpec& problem, QueryLedger& ledger, NoiseModel& noise,
                   const Regularizer& reg, const Vector& x0, const SolverConfig& cfg) {
  const Index d = problem.dimension();
  validate(cfg, d);
  if (x0.size() != d) throw ContractViolation("x0 has the wrong dimension");

  Oracle oracle(problem, ledger, noise);
  const std::uint64_t start_queries = ledger.count();
  auto spent = [&] { return ledger.count() - start_queries; };

  RunResult result;
  RunTrace& trace = result.trace;
  Vector x = x0;

  const double scale = std::max(1.0, x0.lpNorm<Eigen::Infinity>());
  const double sigma = problem.noise_bound();
  const double hess = problem.hessian_l1_bound();
  trace.delta = cfg.delta ? *cfg.delta
                          : (sigma == 0.0 || hess <= 0.0 ? default_delta(0.0, 1.0, scale)
                                                         : default_delta(sigma, hess));
  double alpha = 0.0;
  if (cfg.step_size) {
    alpha = *cfg.step_size;
  } else if (cfg.estimator == EstimatorKind::spsa) {
    alpha = 1.0 / (problem.lipschitz() *
                   (1.0 + static_cast<double>(d - 1) / static_cast<double>(cfg.spsa_batch)));
  } else {
    alpha = 1.0 / problem.lipschitz();
  }

  const Index sparsity = std::min(cfg.sparsity, d);
  const Index m = default_m(sparsity, d, cfg.b1);
  DirectionSet dirs;
  if (cfg.estimator == EstimatorKind::zoro_fixed ||
      cfg.estimator == EstimatorKind::zoro_opportunistic) {
    dirs = rademacher_directions(m, d, derive_seed(cfg.seed, 1));
    trace.directions = m;
  }
  Rng spsa_rng(derive_seed(cfg.seed, 2));
  OppState opp;
  bool have_support = false;
  std::optional<Vector> previous_estimate;

  const double f0 = objective_of(problem, reg, x);
  const double divergence_level = kDivergenceFactor * (1.0 + std::abs(f0));
  trace.records.push_back({0, spent(), f0, error_of(problem, f0), 0.0, 0, 0.0});

  auto error_reached = [&](double objective) {
    return cfg.error_threshold && problem.optimum_value() &&
           objective - *problem.optimum_value() <= *cfg.error_threshold;
  };

  auto round_cost = [&]() -> std::uint64_t {
    std::uint64_t cost = 0;
    switch (cfg.estimator) {
      case EstimatorKind::zoro_fixed:
        cost = static_cast<std::uint64_t>(m) + 1;
        break;
      case EstimatorKind::zoro_opportunistic:
        cost = have_support ? opp.prev_support.size() + 1 +
                                  static_cast<std::uint64_t>(std::max<Index>(cfg.stage1_extra, 0))
                            : static_cast<std::uint64_t>(m) + 1;
        break;
      case EstimatorKind::fdsa:
        cost = static_cast<std::uint64_t>(d) + 1;
        break;
      case EstimatorKind::spsa:
        cost = 2ULL * static_cast<std::uint64_t>(cfg.spsa_batch);
        break;
    }
    return cost + (cfg.target_value ? 3U : 0U);
  };

  int increases = 0;
  double last_base = std::numeric_limits<double>::quiet_NaN();
  trace.status = StopStatus::iterations;

  for (int k = 0; k < cfg.max_iterations; ++k) {
    if (cfg.query_budget && spent() + round_cost() > *cfg.query_budget) {
      trace.status = StopStatus::budget;
      break;
    }

    GradientEstimate est;
    Vector next;
    try {
      switch (cfg.estimator) {
        case EstimatorKind::zoro_fixed: {
          CosampConfig cosamp_cfg;
          cosamp_cfg.max_iterations = cfg.cosamp_iterations;
          if (cfg.warm_start && previous_estimate) cosamp_cfg.init = previous_estimate;
          est = estimate_gradient(oracle, x, sparsity, trace.delta, dirs, cosamp_cfg);
          break;
        }
        case EstimatorKind::zoro_opportunistic: {
          if (!have_support) {
            CosampConfig cosamp_cfg;
            cosamp_cfg.max_iterations = cfg.cosamp_iterations;
            est = estimate_gradient(oracle, x, sparsity, trace.delta, dirs, cosamp_cfg);
            est.method = EstimatorKind::zoro_opportunistic;
            opp.dirs = dirs;
            opp.m_current = dirs.rows();
          } else {
            OppOptions options;
            options.phi = cfg.phi;
            options.stage1_extra = cfg.stage1_extra;
            options.cosamp_iterations = cfg.cosamp_iterations;
            auto [opp_est, opp_state] =
                opportunistic_estimate(oracle, x, std::move(opp), trace.delta, options);
            est = std::move(opp_est);
            opp = std::move(opp_state);
          }
          opp.prev_support = est.support;
          opp.s_current = std::max<Index>(1, static_cast<Index>(est.support.size()));
          // An all-zero estimate leaves nothing to reuse; fall back to a full round.
          have_support = !est.support.empty();
          break;
        }
        case EstimatorKind::fdsa:
          est = fdsa_gradient(oracle, x, trace.delta);
          break;
        case EstimatorKind::spsa:
          est = spsa_gradient(oracle, x, trace.delta, cfg.spsa_batch, spsa_rng);
          break;
      }
      {
        EstimatorScope step_scope;
        next = reg.prox(x - alpha * est.g_hat, alpha);
      }
    } catch (const EvaluationFailure& e) {
      trace.status = StopStatus::failure;
      trace.message = e.what();
      break;
    } catch (const DomainError& e) {
      trace.status = StopStatus::failure;
      trace.message = e.what();
      break;
    }
    previous_estimate = est.g_hat;

    const double base = est.base_value.value_or(std::numeric_limits<double>::quiet_NaN());
    if (cfg.backtracking && !std::isnan(base)) {
      increases = base > last_base ? increases + 1 : 0;
      last_base = base;
      if (increases >= 3) {
        alpha *= 0.5;
        increases = 0;
      }
    }

    const double step_norm = (next - x).norm();
    x = std::move(next);

    bool hit_target = false;
    if (cfg.target_value) {
      try {
        std::array<double, 3> samples{};
        for (double& v : samples) v = oracle(x);
        std::sort(samples.begin(), samples.end());
        const double r = reg.value(x);
        hit_target = samples[1] + (std::isfinite(r) ? r : 0.0) - *cfg.target_value <= 0.0;
      } catch (const EvaluationFailure& e) {
        trace.status = StopStatus::failure;
        trace.message = e.what();
        break;
      }
    }

    double fk = std::numeric_limits<double>::quiet_NaN();
    try {
      fk = objective_of(problem, reg, x);
    } catch (const DomainError& e) {
      trace.status = StopStatus::failure;
      trace.message = e.what();
      break;
    }
    trace.records.push_back({k + 1, spent(), fk, error_of(problem, fk), est.g_hat.norm(),
                             static_cast<Index>(est.support.size()), step_norm});

    if (!std::isfinite(fk) || fk > divergence_level) {
      trace.status = StopStatus::divergence;
      break;
    }
    if (hit_target || error_reached(fk)) {
      trace.status = StopStatus::target;
      break;
    }
  }

  trace.step_size = alpha;
  trace.total_queries = spent();
  result.x = std::move(x);
  return result;
}

}  // namespace zoro
