#include <cmath>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "zoro/estimators.hpp"
#include "zoro/solver.hpp"

namespace zoro {
namespace {

struct Harness {
  explicit Harness(ProblemSpec p, NoiseModel n = NoiseModel::none())
      : problem(std::move(p)), noise(std::move(n)), oracle(problem, ledger, noise) {}
  ProblemSpec problem;
  QueryLedger ledger;
  NoiseModel noise;
  Oracle oracle;
};

Vector random_unit(Index d, Seed seed) {
  Rng rng(seed);
  Vector x(d);
  for (Index i = 0; i < d; ++i) x[i] = rng.normal();
  return x / x.norm();
}

ProblemSpec fixed_support_quadratic(Index d, const IndexSet& support) {
  Vector diag = Vector::Zero(d);
  for (Index i : support) diag[i] = 2.0;
  return make_diagonal_quadratic(diag, "fixed_support");
}

TEST(EstimateGradient, LinearSparseObjectiveIsRecovered) {
  Vector c = Vector::Zero(100);
  c[3] = 1.0;
  c[17] = -2.0;
  c[40] = 0.5;
  c[77] = 3.0;
  c[98] = -1.5;
  Harness h(make_linear(c));
  const DirectionSet dirs(default_m(5, 100), 100, 4);
  const GradientEstimate est = estimate_gradient(h.oracle, Vector::Zero(100), 5, 1e-3, dirs);
  EXPECT_LE((est.g_hat - c).norm() / c.norm(), 1e-6);
  EXPECT_EQ(est.queries_used, static_cast<std::uint64_t>(dirs.rows()) + 1);
  EXPECT_EQ(est.queries_used, h.ledger.count());
  EXPECT_EQ(est.method, EstimatorKind::zoro_fixed);
}

TEST(EstimateGradient, SparseQuadraticSmallDelta) {
  Harness h(make_sparse_quadratic(200, 20, 3));
  const Vector x = random_unit(200, 5);
  const DirectionSet dirs(default_m(20, 200), 200, 8);
  const GradientEstimate est = estimate_gradient(h.oracle, x, 20, 1e-5, dirs);
  const Vector g = h.problem.true_gradient(x);
  EXPECT_LE((est.g_hat - g).norm() / g.norm(), 1e-3);
  EXPECT_LE(static_cast<Index>(est.support.size()), 20);
}

TEST(EstimateGradient, ZeroGradientAtMinimum) {
  Harness h(make_sparse_quadratic(50, 5, 3));
  const DirectionSet dirs(default_m(5, 50), 50, 1);
  const GradientEstimate est = estimate_gradient(h.oracle, Vector::Zero(50), 5, 1e-9, dirs);
  EXPECT_LE(est.g_hat.norm(), 1e-8 * h.problem.hessian_l1_bound());
}

TEST(EstimateGradient, RejectsBadInput) {
  Harness h(make_sparse_quadratic(10, 2, 3));
  const DirectionSet dirs(5, 10, 1);
  EXPECT_THROW(estimate_gradient(h.oracle, Vector::Zero(9), 2, 1e-3, dirs), ContractViolation);
  EXPECT_THROW(estimate_gradient(h.oracle, Vector::Zero(10), 2, 0.0, dirs), ContractViolation);
}

TEST(EstimateGradient, NeverConsultsTrueGradient) {
  // The synthetic's exact gradient throws inside an estimator scope, so any
  // accidental use would surface here.
  Harness h(make_max_k_squared_sum(40, 4));
  const DirectionSet dirs(default_m(4, 40), 40, 2);
  EXPECT_NO_THROW(estimate_gradient(h.oracle, random_unit(40, 1), 4, 1e-4, dirs));
}

OppState seeded_state(Harness& h, const Vector& x, Index s, Seed seed) {
  const DirectionSet dirs(default_m(s, h.problem.dimension()), h.problem.dimension(), seed);
  const GradientEstimate first = estimate_gradient(h.oracle, x, s, 1e-6, dirs);
  OppState state;
  state.dirs = dirs;
  state.prev_support = first.support;
  state.s_current = static_cast<Index>(first.support.size());
  state.m_current = dirs.rows();
  return state;
}

TEST(Opportunistic, FixedSupportExitsAtStageOne) {
  const IndexSet support{4, 19, 33, 60, 91};
  Harness h(fixed_support_quadratic(100, support));
  Vector x = random_unit(100, 3);
  OppState state = seeded_state(h, x, 5, 11);
  ASSERT_EQ(state.prev_support, support);
  for (int k = 0; k < 10; ++k) {
    x *= 0.7;
    const std::uint64_t before = h.ledger.count();
    auto [est, next] = opportunistic_estimate(h.oracle, x, std::move(state), 1e-6);
    EXPECT_EQ(h.ledger.count() - before, 6u);
    EXPECT_EQ(est.queries_used, 6u);
    EXPECT_EQ(est.stage, 1);
    EXPECT_EQ(est.support, support);
    state = std::move(next);
  }
}

TEST(Opportunistic, SupportSwapEscalates) {
  // Active set {0, 1} before the swap, {2, 3} after.
  const Index d = 60;
  Harness h(make_max_k_squared_sum(d, 2));
  Vector before = Vector::Constant(d, 0.01);
  before[0] = 2.0;
  before[1] = -1.5;
  OppState state = seeded_state(h, before, 2, 5);
  ASSERT_EQ(state.prev_support, (IndexSet{0, 1}));
  Vector after = Vector::Constant(d, 0.01);
  after[2] = 2.0;
  after[3] = 1.0;
  OppOptions options;
  options.stage1_extra = 4;
  auto [est, next] = opportunistic_estimate(h.oracle, after, std::move(state), 1e-6, options);
  EXPECT_GE(est.stage, 2);
  EXPECT_EQ(est.support, (IndexSet{2, 3}));
  EXPECT_EQ(next.prev_support, (IndexSet{2, 3}));
  EXPECT_EQ(next.m_current, next.dirs.rows());
  EXPECT_GE(next.s_current, 1);
}

TEST(Opportunistic, PhiOneAlwaysExitsStageOne) {
  Harness h(make_max_k_squared_sum(60, 2));
  Vector before = Vector::Constant(60, 0.01);
  before[0] = 2.0;
  before[1] = -1.5;
  OppState state = seeded_state(h, before, 2, 5);
  Vector after = Vector::Constant(60, 0.01);
  after[2] = 2.0;
  after[3] = 1.0;
  OppOptions options;
  options.phi = 1.0;
  options.stage1_extra = 4;
  auto [est, next] = opportunistic_estimate(h.oracle, after, std::move(state), 1e-6, options);
  EXPECT_EQ(est.stage, 1);
  EXPECT_EQ(est.queries_used, 2u + 4u + 1u);
}

TEST(Opportunistic, CostNeverExceedsDenseRound) {
  const Index d = 40;
  Harness h(make_rotated_sparse_quadratic(d, 0.2, 3));
  Vector x = random_unit(d, 2);
  OppState state = seeded_state(h, x, 2, 9);
  OppOptions options;
  options.phi = 0.01;
  options.stage1_extra = 3;
  for (int k = 0; k < 5; ++k) {
    const std::uint64_t stage1 = state.prev_support.size() + 3 + 1;
    auto [est, next] = opportunistic_estimate(h.oracle, x, std::move(state), 1e-5, options);
    EXPECT_LE(est.queries_used, static_cast<std::uint64_t>(d) + 1 + stage1);
    EXPECT_TRUE(est.g_hat.allFinite());
    state = std::move(next);
    x = 0.5 * x + 0.1 * random_unit(d, 20 + k);
  }
}

TEST(Opportunistic, DenseFallbackWhenGrowthReachesDimension) {
  const Index d = 12;
  Harness h(make_rotated_sparse_quadratic(d, 0.5, 4));
  const Vector x = random_unit(d, 6);
  OppState state;
  state.dirs = DirectionSet(2, d, 3);
  state.prev_support = {0};
  state.m_current = 2;
  OppOptions options;
  options.phi = 1e-9;
  options.stage1_extra = 1;
  auto [est, next] = opportunistic_estimate(h.oracle, x, std::move(state), 1e-6, options);
  EXPECT_TRUE(est.dense_fallback);
  EXPECT_EQ(est.stage, 4);
  EXPECT_EQ(next.dirs.rows(), d);
  EXPECT_EQ(est.queries_used, static_cast<std::uint64_t>(d) + 1);
  EXPECT_LE(est.relative_fit_residual, 1e-5);
  if (Eigen::FullPivLU<Matrix>(next.dirs.matrix()).rank() == d) {
    EXPECT_LE((est.g_hat - h.problem.true_gradient(x)).norm(), 1e-4);
  }
}

TEST(Opportunistic, RejectsEmptySupportAndBadPhi) {
  Harness h(make_sparse_quadratic(10, 2, 1));
  OppState state;
  state.dirs = DirectionSet(4, 10, 1);
  EXPECT_THROW(opportunistic_estimate(h.oracle, Vector::Ones(10), state, 1e-3), ContractViolation);
  state.prev_support = {1};
  OppOptions options;
  options.phi = 0.0;
  EXPECT_THROW(opportunistic_estimate(h.oracle, Vector::Ones(10), state, 1e-3, options),
               ContractViolation);
}

TEST(Fdsa, LinearExact) {
  Vector c = Vector::LinSpaced(7, -3, 3);
  Harness h(make_linear(c));
  const GradientEstimate est = fdsa_gradient(h.oracle, Vector::Ones(7), 0.25);
  EXPECT_LE((est.g_hat - c).norm(), 1e-12);
}

TEST(Fdsa, QueryCount) {
  Harness h(make_sparse_quadratic(200, 20, 2));
  const GradientEstimate est = fdsa_gradient(h.oracle, Vector::Ones(200), 1e-4);
  EXPECT_EQ(h.ledger.count(), 201u);
  EXPECT_EQ(est.queries_used, 201u);
}

TEST(Fdsa, ForwardDifferenceOfScalarQuadratic) {
  Harness h(make_diagonal_quadratic(Vector::Ones(1)));
  const GradientEstimate est = fdsa_gradient(h.oracle, Vector::Ones(1), 0.01);
  EXPECT_NEAR(est.g_hat[0], 1.005, 1e-12);
}

TEST(Spsa, LinearSingleDirection) {
  Vector c(5);
  c << 1, -1, 2, 0, 0.5;
  Harness h(make_linear(c));
  Rng rng(12);
  Rng replay(12);
  Vector z(5);
  for (Index i = 0; i < 5; ++i) z[i] = replay.sign();
  const GradientEstimate est = spsa_gradient(h.oracle, Vector::Zero(5), 1e-2, 1, rng);
  EXPECT_LE((est.g_hat - c.dot(z) * z).norm(), 1e-12);
  EXPECT_EQ(est.queries_used, 2u);
}

TEST(Spsa, TwoDimensionalExample) {
  Vector c(2);
  c << 1, 0;
  Harness h(make_linear(c));
  // Find a seed whose first direction is (1, 1).
  Seed seed = 0;
  for (;; ++seed) {
    Rng probe(seed);
    const int a = probe.sign();
    const int b = probe.sign();
    if (a == 1 && b == 1) break;
  }
  Rng rng(seed);
  const GradientEstimate est = spsa_gradient(h.oracle, Vector::Zero(2), 0.1, 1, rng);
  EXPECT_NEAR(est.g_hat[0], 1.0, 1e-12);
  EXPECT_NEAR(est.g_hat[1], 1.0, 1e-12);
}

TEST(Spsa, LargeBatchApproachesGradient) {
  Vector c(4);
  c << 1, -2, 0.5, 3;
  Harness h(make_linear(c));
  Rng rng(3);
  const GradientEstimate est = spsa_gradient(h.oracle, Vector::Zero(4), 1e-2, 10000, rng);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(est.g_hat[i], c[i], 0.05 * c.cwiseAbs().maxCoeff());
  EXPECT_EQ(est.queries_used, 20000u);
  EXPECT_THROW(spsa_gradient(h.oracle, Vector::Zero(4), 1e-2, 0, rng), ContractViolation);
}

TEST(EstimatorKind, ParseAndPrint) {
  for (auto k : {EstimatorKind::zoro_fixed, EstimatorKind::zoro_opportunistic, EstimatorKind::fdsa,
                 EstimatorKind::spsa}) {
    EXPECT_EQ(parse_estimator_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_estimator_kind("lasso"), ConfigError);
}

}  // namespace
}  // namespace zoro
