#include <benchmark/benchmark.h>

#include "zoro/estimators.hpp"
#include "zoro/solver.hpp"
#include "zoro/sparse_recovery.hpp"

namespace {

using namespace zoro;

void BM_Cosamp(benchmark::State& state) {
  const Index d = state.range(0);
  const Index s = state.range(1);
  const Index m = default_m(s, d);
  const DirectionSet dirs(m, d, 11);
  const Matrix z = dirs.matrix() / std::sqrt(static_cast<double>(m));
  Rng rng(5);
  Vector g = Vector::Zero(d);
  for (std::size_t i : rng.choose(static_cast<std::size_t>(d), static_cast<std::size_t>(s))) {
    g[static_cast<Index>(i)] = rng.normal();
  }
  const Vector y = z * g;
  CosampConfig cfg;
  cfg.sparsity = s;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cosamp(z, y, cfg));
  }
}
BENCHMARK(BM_Cosamp)->Args({200, 10})->Args({1000, 20})->Args({4000, 40});

void BM_EstimateGradient(benchmark::State& state) {
  const Index d = state.range(0);
  const Index s = 20;
  const ProblemSpec problem = make_sparse_quadratic(d, s, 3);
  const DirectionSet dirs(default_m(s, d), d, 13);
  const Vector x = Vector::Ones(d);
  QueryLedger ledger;
  NoiseModel noise = NoiseModel::none();
  Oracle oracle(problem, ledger, noise);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_gradient(oracle, x, s, 1e-4, dirs));
  }
  state.counters["queries/round"] =
      benchmark::Counter(static_cast<double>(ledger.count()), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_EstimateGradient)->Arg(200)->Arg(1000);

void BM_Fdsa(benchmark::State& state) {
  const Index d = state.range(0);
  const ProblemSpec problem = make_sparse_quadratic(d, 20, 3);
  const Vector x = Vector::Ones(d);
  QueryLedger ledger;
  NoiseModel noise = NoiseModel::none();
  Oracle oracle(problem, ledger, noise);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdsa_gradient(oracle, x, 1e-4));
  }
}
BENCHMARK(BM_Fdsa)->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
