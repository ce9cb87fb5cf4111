#include <benchmark/benchmark.h>

#include "stationing/harness.hpp"

using namespace stationing;

namespace {

struct Bench {
  ExperimentConfig config;
  Scenario scenario;
  EventChain chain;

  Bench() {
    config = load_config(std::filesystem::path(STATIONING_SOURCE_DIR) / "configs" / "benchmark.json");
    scenario = build_scenario(config);
    chain = sample_event_chain(scenario, evaluation_chain_seed(config, 0));
  }
};

const Bench& bench() {
  static const Bench b;
  return b;
}

// State and epoch at the first dispatch decision of a greedy day.
std::pair<WorldState, DecisionEpoch> first_dispatch(const Simulator& sim) {
  WorldState s = sim.initial_state(1);
  while (auto e = sim.advance(s, 1 << 30)) {
    if (!std::holds_alternative<PeriodicTrigger>(e->trigger)) return {s, *e};
    sim.apply_action(s, NoAction{});
  }
  return {s, DecisionEpoch{}};
}

void BM_SampleChain(benchmark::State& state) {
  const Bench& b = bench();
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_event_chain(b.scenario, seed++));
}
BENCHMARK(BM_SampleChain)->Unit(benchmark::kMicrosecond);

void BM_RunDayGreedy(benchmark::State& state) {
  const Bench& b = bench();
  for (auto _ : state) {
    GreedyPolicy greedy;
    benchmark::DoNotOptimize(run_day(b.scenario, b.chain, b.config.sim, greedy, RunOptions{.traffic_seed = 1}));
  }
}
BENCHMARK(BM_RunDayGreedy)->Unit(benchmark::kMillisecond);

void BM_StateCopy(benchmark::State& state) {
  const Bench& b = bench();
  const Simulator sim(b.scenario, b.chain, b.config.sim);
  const auto [root, epoch] = first_dispatch(sim);
  for (auto _ : state) {
    WorldState copy = root;
    benchmark::DoNotOptimize(copy);
  }
}
BENCHMARK(BM_StateCopy)->Unit(benchmark::kMicrosecond);

void BM_Decide(benchmark::State& state) {
  const Bench& b = bench();
  const Simulator sim(b.scenario, b.chain, b.config.sim);
  const auto [root, epoch] = first_dispatch(sim);
  std::vector<EventChain> chains;
  for (std::uint64_t k = 0; k < 4; ++k) chains.push_back(sample_event_chain(b.scenario, 100 + k));
  SearchConfig cfg = b.config.search;
  cfg.iterations = static_cast<std::int32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(decide(b.scenario, b.config.sim, root, epoch, chains, cfg));
  state.counters["chains"] = static_cast<double>(chains.size());
}
BENCHMARK(BM_Decide)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
