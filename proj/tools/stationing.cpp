#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "stationing/harness.hpp"

using namespace stationing;

namespace {

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::string scenario;
  std::int32_t workers = 0;
};

void add_common(CLI::App* cmd, Common& c, bool seed_required) {
  cmd->add_option("--config", c.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  auto* seed = cmd->add_option("--seed", c.seed, "Master seed");
  if (seed_required) seed->required();
  cmd->add_option("--out", c.out, "Output directory")->required();
  cmd->add_option("--scenario", c.scenario, "Scenario directory (overrides the generator)")->check(CLI::ExistingDirectory);
  cmd->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig base_config(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  cfg.seed = c.seed;
  cfg.out_dir = c.out;
  if (!c.scenario.empty()) cfg.scenario_dir = c.scenario;
  if (c.workers > 0) cfg.workers = c.workers;
  return cfg;
}

std::ofstream open_file(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void print_summary(const ExperimentResult& r) {
  std::printf("%-14s %5s %12s %10s %14s %10s\n", "policy", "runs", "served", "left", "deadhead_km", "reward");
  for (const PolicySummary& s : r.summaries) {
    std::printf("%-14s %5d %12.1f %10.1f %14.2f %10.4f", s.policy.c_str(), s.runs, s.served.mean, s.left.mean,
                s.deadhead_km.mean, s.reward.mean);
    if (s.failures > 0) std::printf("  (%d failed)", s.failures);
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Substitute bus stationing and dispatch experiments"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scenario directory");
  Common synth_opts;
  std::uint64_t synth_seed = 1;
  GeneratorSpec spec;
  synth->add_option("--config", synth_opts.config, "Experiment config whose scenario.generator is used")
      ->check(CLI::ExistingFile);
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--out", synth_opts.out, "Scenario directory to write")->required();
  auto* o_routes = synth->add_option("--routes", spec.routes, "Number of routes");
  auto* o_subs = synth->add_option("--substitutes", spec.substitutes, "Number of substitute buses");
  auto* o_sites = synth->add_option("--sites", spec.stationing_sites, "Number of stationing sites");
  auto* o_demand = synth->add_option("--demand", spec.demand_level, "Peak load as a share of capacity");
  auto* o_disr = synth->add_option("--disruptions-per-day", spec.disruptions_per_day, "Expected disruptions per day");

  // run
  auto* run = app.add_subcommand("run", "Evaluate policies on evaluation chains");
  Common run_opts;
  add_common(run, run_opts, true);
  std::vector<std::string> policies;
  std::int32_t chains = 0;
  std::int32_t iterations = 0;
  double exploration = 0.0;
  std::int32_t planning_chains = 0;
  std::string agency;
  bool no_log = false;
  run->add_option("--policy", policies, "Policies (greedy-garage, greedy-agency, greedy-search, mcts, idle)")
      ->required()
      ->delimiter(',');
  run->add_option("--chains", chains, "Evaluation chains")->required()->check(CLI::PositiveNumber);
  run->add_option("--iterations", iterations, "MCTS iterations per tree")->check(CLI::PositiveNumber);
  run->add_option("--exploration", exploration, "UCT exploration constant")->check(CLI::PositiveNumber);
  run->add_option("--planning-chains", planning_chains, "Chains sampled per MCTS decision")->check(CLI::PositiveNumber);
  run->add_option("--agency-plan", agency, "AGENCY stationing plan (JSON)")->check(CLI::ExistingFile);
  run->add_flag("--no-event-log", no_log, "Omit simulator events from the per-run logs");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Grid search over exploration constant and iterations");
  Common sweep_opts;
  add_common(sw, sweep_opts, true);
  std::vector<double> sweep_c;
  std::vector<std::int32_t> sweep_it;
  std::int32_t sweep_chains = 0;
  sw->add_option("--exploration", sweep_c, "Exploration constants")->delimiter(',');
  sw->add_option("--iterations", sweep_it, "Iteration counts")->delimiter(',');
  sw->add_option("--chains", sweep_chains, "Tuning chains")->check(CLI::PositiveNumber);

  // latency
  auto* lat = app.add_subcommand("latency", "Time decisions against iteration counts");
  Common lat_opts;
  add_common(lat, lat_opts, true);
  std::vector<std::int32_t> lat_it;
  std::int32_t lat_epochs = 0;
  double budget = 0.0;
  lat->add_option("--iterations", lat_it, "Iteration counts")->delimiter(',');
  lat->add_option("--epochs", lat_epochs, "Epochs to time")->check(CLI::PositiveNumber);
  lat->add_option("--budget", budget, "Real-time budget per decision, seconds")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      GeneratorSpec g = synth_opts.config.empty() ? GeneratorSpec{} : load_config(synth_opts.config).generator;
      if (o_routes->count()) g.routes = spec.routes;
      if (o_subs->count()) g.substitutes = spec.substitutes;
      if (o_sites->count()) g.stationing_sites = spec.stationing_sites;
      if (o_demand->count()) g.demand_level = spec.demand_level;
      if (o_disr->count()) g.disruptions_per_day = spec.disruptions_per_day;
      const Scenario sc = synthesize_scenario(g, synth_seed);
      save_scenario(synth_opts.out, sc);
      std::printf("wrote %s: %zu stops, %zu trips, %zu vehicles, %zu stationing sites\n", synth_opts.out.c_str(),
                  sc.schedule.stops.size(), sc.schedule.trips.size(), sc.schedule.vehicles.size(),
                  sc.schedule.stationing_sites.size());
      return 0;
    }

    if (run->parsed()) {
      ExperimentConfig cfg = base_config(run_opts);
      cfg.policies = policies;
      cfg.evaluation_chains = chains;
      if (iterations > 0) cfg.search.iterations = iterations;
      if (exploration > 0.0) cfg.search.exploration = exploration;
      if (planning_chains > 0) cfg.search.chains = planning_chains;
      if (!agency.empty()) cfg.agency_plan = agency;
      if (no_log) cfg.event_log = false;
      validate(cfg);
      const Scenario sc = build_scenario(cfg);
      const auto eval = evaluation_chains(sc, cfg);
      const auto tune = tuning_chains(sc, cfg);
      const ExperimentResult result = run_experiment(cfg, sc, eval, tune);
      write_experiment(cfg, sc, result);
      print_summary(result);
      for (const PolicyRun& r : result.runs) {
        if (!r.result) {
          std::fprintf(stderr, "run %s chain %zu failed: %s\n", r.policy.c_str(), r.chain, r.error.c_str());
        }
      }
      const bool failed = std::any_of(result.runs.begin(), result.runs.end(), [](const PolicyRun& r) { return !r.result; });
      return failed ? 1 : 0;
    }

    if (sw->parsed()) {
      ExperimentConfig cfg = base_config(sweep_opts);
      if (!sweep_c.empty()) cfg.sweep_exploration = sweep_c;
      if (!sweep_it.empty()) cfg.sweep_iterations = sweep_it;
      if (sweep_chains > 0) cfg.tuning_chains = sweep_chains;
      validate(cfg);
      const Scenario sc = build_scenario(cfg);
      const auto cells = sweep(cfg, sc, tuning_chains(sc, cfg));
      auto out = open_file(cfg.out_dir / "sweep.csv");
      write_sweep(out, cells);
      write_sweep(std::cout, cells);
      return 0;
    }

    if (lat->parsed()) {
      ExperimentConfig cfg = base_config(lat_opts);
      if (!lat_it.empty()) cfg.latency_iterations = lat_it;
      if (lat_epochs > 0) cfg.latency_epochs = lat_epochs;
      if (budget > 0.0) cfg.latency_budget_s = budget;
      cfg.evaluation_chains = 1;
      validate(cfg);
      const Scenario sc = build_scenario(cfg);
      const auto rows = measure_epoch_latency(cfg, sc, evaluation_chains(sc, cfg));
      auto out = open_file(cfg.out_dir / "latency.csv");
      write_latency(out, rows, cfg.latency_budget_s);
      write_latency(std::cout, rows, cfg.latency_budget_s);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
