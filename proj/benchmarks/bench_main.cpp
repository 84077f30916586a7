// Microbenchmarks for the hot construction and solve paths.  Run with
//   build/benchmarks/rebalance_bench --benchmark_min_time=0.5s
// Sizes follow the synthetic line-city family used everywhere else.

#include <benchmark/benchmark.h>

#include "rebalance/bnb.hpp"
#include "rebalance/generator.hpp"
#include "rebalance/graph.hpp"
#include "rebalance/heuristics.hpp"
#include "rebalance/lp.hpp"
#include "rebalance/model.hpp"
#include "rebalance/queueing.hpp"
#include "rebalance/subproblems.hpp"

namespace {

using namespace rebalance;

Instance sized_instance(int nodes) {
  GeneratorConfig config;
  config.nodes = nodes;
  config.seed = 1;
  return generate_instance(config);
}

void BM_SolveIntensity(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_intensity(m, 2, 0.95));
}
BENCHMARK(BM_SolveIntensity)->Arg(1)->Arg(3)->Arg(10)->Arg(20);

void BM_BuildGraph(benchmark::State& state) {
  const Instance inst = sized_instance(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(inst));
}
BENCHMARK(BM_BuildGraph)->Arg(10)->Arg(50)->Arg(200);

void BM_AssembleModel(benchmark::State& state) {
  const Instance inst = sized_instance(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_model(inst, Mode::NonMyopic));
}
BENCHMARK(BM_AssembleModel)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_MinCostFlow(benchmark::State& state) {
  const Instance inst = sized_instance(static_cast<int>(state.range(0)));
  const NodeChargeGraph graph = build_graph(inst);
  const ChargingPathSet paths = charging_paths(inst);
  const Placement placement = initial_placement(inst);
  for (auto _ : state) benchmark::DoNotOptimize(min_cost_flow(inst, graph, paths, placement));
}
BENCHMARK(BM_MinCostFlow)->Arg(10)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_GreedyPlace(benchmark::State& state) {
  const Instance inst = sized_instance(static_cast<int>(state.range(0)));
  const MilpModel model = assemble_model(inst, Mode::Myopic);
  for (auto _ : state) benchmark::DoNotOptimize(greedy_place(inst, model, Mode::Myopic));
}
BENCHMARK(BM_GreedyPlace)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_ExactSolve(benchmark::State& state) {
  const Instance inst = sized_instance(static_cast<int>(state.range(0)));
  const MilpModel model = assemble_model(inst, Mode::Myopic);
  for (auto _ : state) benchmark::DoNotOptimize(solve_milp(model));
}
BENCHMARK(BM_ExactSolve)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
