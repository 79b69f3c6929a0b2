#include "zoro/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace zoro {

namespace {

double relative_residual(const Matrix& Z, const Vector& g, const Vector& y) {
  const double y_norm = y.norm();
  if (y_norm == 0.0) return 0.0;
  return (Z * g - y).norm() / y_norm;
}

void check_point(const Oracle& oracle, const Vector& x, double delta) {
  if (x.size() != oracle.dimension()) {
    throw ContractViolation("estimator point has dimension " + std::to_string(x.size()) +
                            ", problem has " + std::to_string(oracle.dimension()));
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ContractViolation("sampling radius must be positive and finite");
  }
}

IndexSet all_indices(Index n) {
  IndexSet out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

}  // namespace

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::zoro_fixed:
      return "zoro_fixed";
    case EstimatorKind::zoro_opportunistic:
      return "zoro_opportunistic";
    case EstimatorKind::fdsa:
      return "fdsa";
    case EstimatorKind::spsa:
      return "spsa";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(const std::string& text) {
  if (text == "zoro_fixed" || text == "fixed") return EstimatorKind::zoro_fixed;
  if (text == "zoro_opportunistic" || text == "opportunistic") {
    return EstimatorKind::zoro_opportunistic;
  }
  if (text == "fdsa") return EstimatorKind::fdsa;
  if (text == "spsa") return EstimatorKind::spsa;
  throw ConfigError("unknown method '" + text + "'");
}

IndexSet nonzero_support(const Vector& v) {
  IndexSet out;
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) out.push_back(i);
  }
  return out;
}

GradientEstimate estimate_gradient(Oracle& oracle, const Vector& x, Index sparsity, double delta,
                                   const DirectionSet& dirs, const CosampConfig& base_cfg) {
  EstimatorScope scope;
  check_point(oracle, x, delta);
  const std::uint64_t start = oracle.queries();

  oracle.anchor(x);
  const double base = oracle(x);
  const Vector y_raw = sample_differences(oracle, x, base, delta, dirs, 0, dirs.rows());
  MeasurementSet ms = assemble(y_raw, dirs, delta);

  CosampConfig cfg = base_cfg;
  cfg.sparsity = sparsity;
  SparseSolution sol = cosamp(ms.Z, ms.y, cfg);

  GradientEstimate est;
  est.g_hat = std::move(sol.values);
  est.support = nonzero_support(est.g_hat);
  est.queries_used = oracle.queries() - start;
  est.relative_fit_residual = relative_residual(ms.Z, est.g_hat, ms.y);
  est.method = EstimatorKind::zoro_fixed;
  est.base_value = base;
  return est;
}

std::pair<GradientEstimate, OppState> opportunistic_estimate(Oracle& oracle, const Vector& x,
                                                             OppState state, double delta,
                                                             const OppOptions& options) {
  EstimatorScope scope;
  check_point(oracle, x, delta);
  if (state.prev_support.empty()) {
    throw ContractViolation("opportunistic estimation needs a nonempty previous support");
  }
  if (!(options.phi > 0.0 && options.phi <= 1.0)) {
    throw ContractViolation("opportunistic tolerance phi must lie in (0, 1]");
  }
  if (state.dirs.dimension() != x.size()) {
    throw ContractViolation("opportunistic state directions have the wrong dimension");
  }
  const Index d = x.size();
  const std::uint64_t start = oracle.queries();

  Index s = static_cast<Index>(state.prev_support.size());
  const Index check_rows = s + std::max<Index>(options.stage1_extra, 0);
  if (check_rows > state.dirs.rows()) state.dirs.extend(check_rows - state.dirs.rows());
  Index m = state.dirs.rows();

  GradientEstimate est;
  est.method = EstimatorKind::zoro_opportunistic;

  // Stage 1: restricted fit on the previous support.
  oracle.anchor(x);
  const double base = oracle(x);
  est.base_value = base;
  Vector y_raw(m);
  y_raw.head(check_rows) = sample_differences(oracle, x, base, delta, state.dirs, 0, check_rows);
  {
    const Matrix z_check = state.dirs.matrix().topRows(check_rows);
    const Vector y_check = y_raw.head(check_rows);
    est.g_hat = restricted_least_squares(z_check, y_check, state.prev_support);
    est.relative_fit_residual = relative_residual(z_check, est.g_hat, y_check);
    est.stage = 1;
  }

  if (est.relative_fit_residual > options.phi) {
    // Stage 2: complete the fixed direction set and run CoSaMP.
    if (m > check_rows) {
      y_raw.tail(m - check_rows) =
          sample_differences(oracle, x, base, delta, state.dirs, check_rows, m - check_rows);
    }
    CosampConfig cfg;
    cfg.max_iterations = options.cosamp_iterations;
    auto solve = [&](Index sparsity) {
      const MeasurementSet ms = assemble(y_raw, state.dirs, delta);
      cfg.sparsity = std::min(sparsity, d);
      SparseSolution sol = cosamp(ms.Z, ms.y, cfg);
      est.relative_fit_residual = relative_residual(ms.Z, sol.values, ms.y);
      est.g_hat = std::move(sol.values);
    };
    solve(s);
    est.stage = 2;

    // Stage 3: grow the measurement set and the sparsity together.
    while (est.relative_fit_residual > options.phi) {
      if (m >= d) {
        const MeasurementSet ms = assemble(y_raw, state.dirs, delta);
        est.g_hat = restricted_least_squares(ms.Z, ms.y, all_indices(d));
        est.relative_fit_residual = relative_residual(ms.Z, est.g_hat, ms.y);
        est.dense_fallback = true;
        est.stage = 4;
        break;
      }
      const double ratio = static_cast<double>(d) / static_cast<double>(s);
      Index growth = std::max<Index>(1, static_cast<Index>(std::ceil(std::log(ratio))));
      growth = std::min(growth, d - m);
      state.dirs.extend(growth);
      y_raw.conservativeResize(m + growth);
      y_raw.tail(growth) = sample_differences(oracle, x, base, delta, state.dirs, m, growth);
      m += growth;
      s = std::min(s + 1, d);
      solve(s);
      est.stage = 3;
    }
  }

  est.support = nonzero_support(est.g_hat);
  est.queries_used = oracle.queries() - start;
  state.prev_support = est.support;
  state.s_current = std::max<Index>(1, static_cast<Index>(est.support.size()));
  state.m_current = state.dirs.rows();
  return {std::move(est), std::move(state)};
}

GradientEstimate fdsa_gradient(Oracle& oracle, const Vector& x, double delta) {
  EstimatorScope scope;
  check_point(oracle, x, delta);
  const std::uint64_t start = oracle.queries();
  oracle.anchor(x);
  const double base = oracle(x);
  GradientEstimate est;
  est.g_hat.resize(x.size());
  Vector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + delta;
    est.g_hat[i] = (oracle(probe) - base) / delta;
    probe[i] = x[i];
  }
  est.support = nonzero_support(est.g_hat);
  est.queries_used = oracle.queries() - start;
  est.method = EstimatorKind::fdsa;
  est.base_value = base;
  return est;
}

GradientEstimate spsa_gradient(Oracle& oracle, const Vector& x, double delta, int batch, Rng& rng) {
  EstimatorScope scope;
  check_point(oracle, x, delta);
  if (batch < 1) throw ContractViolation("SPSA batch must be >= 1");
  const std::uint64_t start = oracle.queries();
  oracle.anchor(x);
  GradientEstimate est;
  est.g_hat = Vector::Zero(x.size());
  Vector z(x.size());
  for (int j = 0; j < batch; ++j) {
    for (Index i = 0; i < z.size(); ++i) z[i] = static_cast<double>(rng.sign());
    const double plus = oracle(x + delta * z);
    const double minus = oracle(x - delta * z);
    est.g_hat += ((plus - minus) / (2.0 * delta)) * z;
  }
  est.g_hat /= static_cast<double>(batch);
  est.support = nonzero_support(est.g_hat);
  est.queries_used = oracle.queries() - start;
  est.method = EstimatorKind::spsa;
  return est;
}

}  // namespace zoro
