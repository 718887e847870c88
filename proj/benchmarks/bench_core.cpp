#include <benchmark/benchmark.h>

#include <vector>

#include "luba/dynamics.hpp"
#include "luba/equilibrium.hpp"
#include "luba/rng.hpp"
#include "luba/simulator.hpp"
#include "luba/special.hpp"

namespace {

void BM_SolveInfiniteV(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(luba::solve_infinite_v(lambda));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveInfiniteV)->RangeMultiplier(10)->Range(10, 100000)->Complexity();

void BM_SolveFiniteV(benchmark::State& state) {
  const luba::AuctionSpec spec{10000.0, 0.0, static_cast<double>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(luba::solve_finite_v(spec, 1e-9));
  }
}
BENCHMARK(BM_SolveFiniteV)->Arg(10)->Arg(100)->Arg(1000);

void BM_WinProfile(benchmark::State& state) {
  const luba::Strategy s = luba::solve_infinite_v(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(luba::win_profile(s));
  }
}
BENCHMARK(BM_WinProfile)->Arg(100)->Arg(10000);

void BM_LogIntegral(benchmark::State& state) {
  double z = 1.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(luba::log_integral(z));
    z = z < 1e6 ? z * 1.7 : 1.5;
  }
}
BENCHMARK(BM_LogIntegral);

void BM_SimulateAuctionPoisson(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0));
  const auto p = luba::solve_infinite_v(lambda).probabilities();
  const luba::PopulationModel pop{luba::PopulationMode::poisson, lambda};
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(luba::simulate_auction(p, pop, 1, stream++));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateAuctionPoisson)->Arg(50)->Arg(500)->Arg(2000);

void BM_EnumerateFixedN(benchmark::State& state) {
  const std::vector<double> p(static_cast<std::size_t>(state.range(0)),
                              1.0 / state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(luba::enumerate_fixed_n(p, 8));
  }
}
BENCHMARK(BM_EnumerateFixedN)->Arg(4)->Arg(8);

void BM_ReplicatorStep(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0));
  const luba::Strategy nash = luba::solve_infinite_v(lambda);
  luba::ReplicatorState rs;
  rs.lambda = lambda;
  rs.p = luba::initial_exponential(nash.support_end + 25, 30.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(luba::replicator_rhs(rs));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ReplicatorStep)->RangeMultiplier(10)->Range(100, 10000)->Complexity();

}  // namespace

BENCHMARK_MAIN();
