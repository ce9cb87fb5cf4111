#include "stationing/policy.hpp"

#include <chrono>

namespace stationing {

Action nearest_dispatch(const DecisionEpoch& epoch) {
  const auto& actions = epoch.feasible_actions;
  if (const auto* o = std::get_if<OverageTrigger>(&epoch.trigger)) {
    for (const Action& a : actions) {
      const auto* d = std::get_if<Dispatch>(&a);
      if (d && d->trip == o->trip && d->stop_index == o->stop_index) return a;
    }
    return NoAction{};
  }
  // Breakdown epochs offer exactly one dispatch; periodic epochs list
  // takeovers after the stationing moves.
  for (const Action& a : actions) {
    if (std::holds_alternative<Dispatch>(a)) return a;
  }
  return NoAction{};
}

RunResult run_day(const Scenario& scenario, const EventChain& chain, const SimConfig& config, Policy& policy,
                  const RunOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const Simulator sim(scenario, chain, config);
  WorldState state = sim.initial_state(options.traffic_seed, options.placement);
  state.tally.reset(0, options.weights.discount);

  RunResult out;
  EventLog* log = options.keep_log ? &out.log : nullptr;
  Seconds last_clock = state.clock;
  auto audit = [&] {
    if (!options.audit || out.violations.size() >= 20) return;
    if (state.clock < last_clock) out.violations.push_back("clock moved backwards");
    last_clock = state.clock;
    for (auto& v : audit_state(state, scenario.schedule)) out.violations.push_back(std::move(v));
  };

  while (!sim.done(state)) {
    auto epoch = sim.step(state, log);
    ++out.metrics.events;
    audit();
    if (!epoch) continue;
    const auto t0 = Clock::now();
    Decision d = policy.choose(*epoch, state, sim);
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (log) {
      LogRecord r = LogRecord::at(epoch->time, "decision");
      r.group = static_cast<std::int32_t>(out.decisions.size());
      log->push_back(r);
    }
    sim.apply_action(state, d.action, log);
    audit();
    ++out.metrics.epochs;
    if (std::holds_alternative<Dispatch>(d.action)) ++out.metrics.dispatches;
    if (std::holds_alternative<Station>(d.action)) ++out.metrics.stationings;
    out.metrics.latency_ms.push_back(ms);
    out.decisions.push_back(
        DecisionRecord{epoch->time, epoch->trigger, epoch->feasible_actions.size(), d.action, std::move(d.values), ms});
  }

  RunMetrics& m = out.metrics;
  m.generated = state.generated;
  m.served = state.served;
  m.left = state.left;
  m.delivered = state.delivered;
  for (VehicleId v : scenario.schedule.substitutes()) {
    m.deadhead_km.push_back(state.vehicles[v.index()].deadhead_km);
    m.total_deadhead_km += state.vehicles[v.index()].deadhead_km;
  }
  for (const VehicleState& v : state.vehicles) {
    if (v.kind == VehicleKind::Regular) m.regular_km += v.service_km;
  }
  m.reward = reward(state.tally, options.weights);
  if (options.audit && (state.waiting_count() != 0 || state.onboard() != 0)) {
    out.violations.push_back("passengers still in the system at the end of the day");
  }
  m.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return out;
}

}  // namespace stationing
