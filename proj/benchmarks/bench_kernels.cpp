// Serial-reference vs OpenMP kernel comparison: pattern-space enumeration,
// Monte Carlo replication, and the cubic ONP table build for scale.

#include <benchmark/benchmark.h>

#include <vector>

#include "grouptest/dp.hpp"
#include "grouptest/gpta.hpp"
#include "grouptest/model.hpp"
#include "grouptest/sim.hpp"

namespace {

grouptest::ProbabilityVector bench_vector(int n) {
  std::vector<double> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    p[static_cast<std::size_t>(i)] = 0.30 + 0.08 * i / n;
  }
  return grouptest::validate_probabilities(p);
}

void BM_EnumerationSerial(benchmark::State& state) {
  const auto v = bench_vector(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        grouptest::exact_expected_by_enumeration_serial(v, grouptest::run_gpta));
  }
}
BENCHMARK(BM_EnumerationSerial)->Arg(14)->Arg(16)->Arg(18)->Unit(benchmark::kMillisecond);

void BM_EnumerationParallel(benchmark::State& state) {
  const auto v = bench_vector(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        grouptest::exact_expected_by_enumeration(v, grouptest::run_gpta, 0));
  }
}
BENCHMARK(BM_EnumerationParallel)->Arg(14)->Arg(16)->Arg(18)->Unit(benchmark::kMillisecond);

void BM_SimulateSerial(benchmark::State& state) {
  const auto v = bench_vector(10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(grouptest::simulate_serial(
        grouptest::SimPolicy::gpta(), v, static_cast<std::uint64_t>(state.range(0)), 7));
  }
}
BENCHMARK(BM_SimulateSerial)->Arg(100000)->Arg(400000)->Unit(benchmark::kMillisecond);

void BM_SimulateParallel(benchmark::State& state) {
  const auto v = bench_vector(10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(grouptest::simulate(
        grouptest::SimPolicy::gpta(), v, static_cast<std::uint64_t>(state.range(0)), 7, 0));
  }
}
BENCHMARK(BM_SimulateParallel)->Arg(100000)->Arg(400000)->Unit(benchmark::kMillisecond);

void BM_OnpTables(benchmark::State& state) {
  const auto v = bench_vector(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(grouptest::optimal_onp(v).cost);
  }
}
BENCHMARK(BM_OnpTables)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
