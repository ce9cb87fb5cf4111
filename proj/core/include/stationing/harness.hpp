#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stationing/baselines.hpp"
#include "stationing/solver.hpp"

namespace stationing {

struct ExperimentConfig {
  std::uint64_t seed = 0;
  // Scenario directory; when empty the generator spec is used.
  std::filesystem::path scenario_dir;
  GeneratorSpec generator;
  std::uint64_t generator_seed = 1;

  std::vector<std::string> policies{"greedy-garage", "mcts"};
  std::int32_t evaluation_chains = 20;
  std::int32_t tuning_chains = 20;

  SimConfig sim;
  SearchConfig search;
  AnnealingParams annealing;
  // Weights used to score full days; undiscounted.
  RewardWeights evaluation_weights{1.0, -1.0, 1.0};
  std::filesystem::path agency_plan;

  std::filesystem::path out_dir = "out";
  std::int32_t workers = 1;
  bool event_log = true;

  std::vector<double> sweep_exploration{100.0, 1000.0, 5000.0};
  std::vector<std::int32_t> sweep_iterations{50, 100, 200};

  std::vector<std::int32_t> latency_iterations{50, 100, 200, 400};
  std::int32_t latency_epochs = 10;
  double latency_budget_s = 300.0;
};

void validate(const ExperimentConfig& config);

// Versioned JSON document. Relative paths resolve against `base_dir`.
// Unknown keys are rejected.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const ExperimentConfig& config);

// Policies understood by the harness.
const std::vector<std::string>& known_policies();

Scenario build_scenario(const ExperimentConfig& config);

// Evaluation and tuning chains come from disjoint seed streams.
std::vector<EventChain> evaluation_chains(const Scenario& scenario, const ExperimentConfig& config);
std::vector<EventChain> tuning_chains(const Scenario& scenario, const ExperimentConfig& config);
std::uint64_t evaluation_chain_seed(const ExperimentConfig& config, std::size_t k);

struct PolicyRun {
  std::string policy;
  std::size_t chain = 0;
  std::uint64_t chain_seed = 0;
  std::optional<RunResult> result;
  std::string error;
};

struct Stat {
  double mean = 0.0;
  double stdev = 0.0;
};

Stat summarize(const std::vector<double>& values);
double percentile(std::vector<double> values, double q);

struct PolicySummary {
  std::string policy;
  std::int32_t runs = 0;
  std::int32_t failures = 0;
  Stat served;
  Stat left;
  Stat generated;
  Stat deadhead_km;
  Stat regular_km;
  Stat reward;
  Stat epochs;
  Stat dispatches;
  Stat stationings;
  double latency_mean_ms = 0.0;
  double latency_p95_ms = 0.0;
};

struct ExperimentResult {
  std::vector<StationingPlan> plans;
  std::vector<PolicyRun> runs;
  std::vector<PolicySummary> summaries;
};

PolicySummary summarize_policy(const std::string& policy, const std::vector<PolicyRun>& runs);

// Every policy on every chain. A failing run is recorded and the rest
// continue.
ExperimentResult run_experiment(const ExperimentConfig& config, const Scenario& scenario,
                                std::span<const EventChain> evaluation, std::span<const EventChain> tuning);

// metrics.csv, runs.csv, runs/<policy>__chain<k>.jsonl, plans.json and
// summary.json under config.out_dir.
void write_experiment(const ExperimentConfig& config, const Scenario& scenario, const ExperimentResult& result);

struct SweepCell {
  double exploration = 0.0;
  std::int32_t iterations = 0;
  double served_mean = 0.0;
  double baseline_served_mean = 0.0;
  // Relative gain in mean served passengers over greedy-garage.
  double improvement = 0.0;
  double deadhead_mean = 0.0;
  double latency_mean_ms = 0.0;
  bool selected = false;
};

// MCTS over the exploration x iterations grid on the tuning chains. The
// selected cell has the highest improvement, then the lowest latency.
std::vector<SweepCell> sweep(const ExperimentConfig& config, const Scenario& scenario,
                             std::span<const EventChain> tuning);
void write_sweep(std::ostream& out, const std::vector<SweepCell>& cells);

struct LatencyRow {
  std::int32_t iterations = 0;
  std::int32_t epochs = 0;
  double mean_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;
  bool over_budget = false;
};

// Times decide on a fixed set of epochs taken from a greedy day on the
// first evaluation chain.
std::vector<LatencyRow> measure_epoch_latency(const ExperimentConfig& config, const Scenario& scenario,
                                              std::span<const EventChain> evaluation);
void write_latency(std::ostream& out, const std::vector<LatencyRow>& rows, double budget_s);

// Text helpers shared with the command-line tool.
std::string format_number(double value, int precision = 6);
std::string describe(const Action& action, const TransitSchedule& schedule);

}  // namespace stationing
