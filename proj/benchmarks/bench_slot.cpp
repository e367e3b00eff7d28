#include <benchmark/benchmark.h>

#include "hcran/harness.hpp"
#include "hcran/oracle.hpp"
#include "hcran/qcqp.hpp"
#include "hcran/wmmse.hpp"

using namespace hcran;

namespace {

void BM_QcqpSolve(benchmark::State& state) {
  Rng rng = make_stream(1, 0);
  const qcqp::QcqpProblem p =
      oracle::random_qcqp(4, static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(qcqp::solve(p));
}
BENCHMARK(BM_QcqpSolve)->Args({4, 6})->Args({8, 10})->Args({16, 20});

void BM_SlotProblem(benchmark::State& state) {
  SystemConfig c;
  c.fronthaul_cap = state.range(0) ? 6.0 : kInfinity;
  Rng rng = make_stream(2, 0);
  const auto [p, start] = oracle::random_slot_problem(c, rng);
  for (auto _ : state) benchmark::DoNotOptimize(run_algorithm1(p, start, c));
}
BENCHMARK(BM_SlotProblem)->Arg(0)->Arg(1);

void BM_Trajectory(benchmark::State& state) {
  SystemConfig c;
  c.slots = 100;
  const TrafficConfig t = TrafficConfig::uniform(c.num_rue, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(run_trajectory(c, t, 3, false));
}
BENCHMARK(BM_Trajectory)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
