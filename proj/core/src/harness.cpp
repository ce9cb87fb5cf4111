#include "stationing/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "stationing/parallel.hpp"

namespace stationing {

using detail::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

template <class T>
void read(const json& obj, const char* key, T& target, const std::string& where) {
  target = detail::field_or<T>(obj, key, target, where);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

json generator_to_json(const GeneratorSpec& g) {
  return {{"routes", g.routes},
          {"stops_per_route", g.stops_per_route},
          {"buses_per_route", g.buses_per_route},
          {"trips_per_bus", g.trips_per_bus},
          {"substitutes", g.substitutes},
          {"stationing_sites", g.stationing_sites},
          {"capacity", g.capacity},
          {"demand_level", g.demand_level},
          {"disruptions_per_day", g.disruptions_per_day},
          {"area_km", g.area_km},
          {"stop_spacing_km", g.stop_spacing_km},
          {"scheduled_speed_kmh", g.scheduled_speed_kmh},
          {"dwell_s", g.dwell},
          {"layover_s", g.layover},
          {"service_start_s", g.service_start},
          {"detour_factor", g.detour_factor},
          {"travel_samples", g.travel_samples},
          {"fallback_speed_kmh", g.fallback_speed_kmh}};
}

void generator_from_json(const json& j, GeneratorSpec& g) {
  const std::string w = "scenario.generator";
  check_keys(j,
             {"routes", "stops_per_route", "buses_per_route", "trips_per_bus", "substitutes", "stationing_sites",
              "capacity", "demand_level", "disruptions_per_day", "area_km", "stop_spacing_km", "scheduled_speed_kmh",
              "dwell_s", "layover_s", "service_start_s", "detour_factor", "travel_samples", "fallback_speed_kmh"},
             w);
  read(j, "routes", g.routes, w);
  read(j, "stops_per_route", g.stops_per_route, w);
  read(j, "buses_per_route", g.buses_per_route, w);
  read(j, "trips_per_bus", g.trips_per_bus, w);
  read(j, "substitutes", g.substitutes, w);
  read(j, "stationing_sites", g.stationing_sites, w);
  read(j, "capacity", g.capacity, w);
  read(j, "demand_level", g.demand_level, w);
  read(j, "disruptions_per_day", g.disruptions_per_day, w);
  read(j, "area_km", g.area_km, w);
  read(j, "stop_spacing_km", g.stop_spacing_km, w);
  read(j, "scheduled_speed_kmh", g.scheduled_speed_kmh, w);
  read(j, "dwell_s", g.dwell, w);
  read(j, "layover_s", g.layover, w);
  read(j, "service_start_s", g.service_start, w);
  read(j, "detour_factor", g.detour_factor, w);
  read(j, "travel_samples", g.travel_samples, w);
  read(j, "fallback_speed_kmh", g.fallback_speed_kmh, w);
}

json action_json(const Action& a, const TransitSchedule& s) {
  if (const auto* d = std::get_if<Dispatch>(&a)) {
    return {{"type", "dispatch"},
            {"vehicle", s.vehicle(d->vehicle).id},
            {"trip", s.trip(d->trip).id},
            {"stop_index", d->stop_index},
            {"stop", s.stop(s.trip(d->trip).stops[static_cast<std::size_t>(d->stop_index)].stop).id}};
  }
  if (const auto* st = std::get_if<Station>(&a)) {
    return {{"type", "station"}, {"vehicle", s.vehicle(st->vehicle).id}, {"site", s.stop(st->site).id}};
  }
  return {{"type", "none"}};
}

json trigger_json(const EpochTrigger& trigger, const TransitSchedule& s) {
  json j{{"kind", trigger_name(trigger)}};
  if (const auto* o = std::get_if<OverageTrigger>(&trigger)) {
    j["vehicle"] = s.vehicle(o->vehicle).id;
    j["trip"] = s.trip(o->trip).id;
    j["stop_index"] = o->stop_index;
    j["left_behind"] = o->left_behind;
  } else if (const auto* b = std::get_if<BreakdownTrigger>(&trigger)) {
    j["vehicle"] = s.vehicle(b->vehicle).id;
    j["trip"] = s.trip(b->trip).id;
    j["stop_index"] = b->stop_index;
  } else {
    const VehicleId v = std::get<PeriodicTrigger>(trigger).substitute;
    if (v.valid()) j["vehicle"] = s.vehicle(v).id;
  }
  return j;
}

json log_json(const LogRecord& r, const TransitSchedule& s) {
  json j{{"type", "event"}, {"t", r.time}, {"kind", r.kind}};
  if (r.vehicle.valid()) j["vehicle"] = s.vehicle(r.vehicle).id;
  if (r.trip.valid()) j["trip"] = s.trip(r.trip).id;
  if (r.stop_index >= 0) j["stop_index"] = r.stop_index;
  if (r.stop.valid()) j["stop"] = s.stop(r.stop).id;
  if (r.group >= 0) j["group"] = r.group;
  const std::string_view kind = r.kind;
  if (kind == "bus_arrival") {
    j["boarded"] = r.boarded;
    j["alighted"] = r.alighted;
    j["left_behind"] = r.count;
  } else if (kind == "passenger_arrival" || kind == "passenger_leave" || kind == "breakdown") {
    j["count"] = r.count;
  } else if (kind == "dispatch" || kind == "station") {
    j["km"] = r.km;
  }
  return j;
}

std::string run_file_name(const std::string& policy, std::size_t chain) {
  return policy + "__chain" + std::to_string(chain) + ".jsonl";
}

struct PolicyFactory {
  const ExperimentConfig& config;
  const Scenario& scenario;
  const std::vector<StationingPlan>& plans;

  const StationingPlan& plan(const std::string& label) const {
    for (const auto& p : plans) {
      if (p.label == label) return p;
    }
    throw ConfigError("stationing plan " + label + " was not prepared");
  }

  std::pair<std::unique_ptr<Policy>, Placement> make(const std::string& name, std::size_t chain) const {
    if (name == "greedy-garage") return {std::make_unique<GreedyPolicy>(), plan("GARAGE").assignments};
    if (name == "greedy-agency") return {std::make_unique<GreedyPolicy>(), plan("AGENCY").assignments};
    if (name == "greedy-search") return {std::make_unique<GreedyPolicy>(), plan("SEARCH").assignments};
    if (name == "idle") return {std::make_unique<IdlePolicy>(), plan("GARAGE").assignments};
    if (name == "mcts") {
      SearchConfig c = config.search;
      c.seed = derive_seed(config.seed, SeedStream::Policy, chain);
      return {std::make_unique<MctsPolicy>(scenario, config.sim, c), plan("GARAGE").assignments};
    }
    throw ConfigError("unknown policy '" + name + "'");
  }
};

std::set<std::string> needed_plans(const std::vector<std::string>& policies) {
  std::set<std::string> out{"GARAGE"};
  for (const auto& p : policies) {
    if (p == "greedy-agency") out.insert("AGENCY");
    if (p == "greedy-search") out.insert("SEARCH");
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

}  // namespace

// --- config ----------------------------------------------------------------------

const std::vector<std::string>& known_policies() {
  static const std::vector<std::string> names{"greedy-garage", "greedy-agency", "greedy-search", "mcts", "idle"};
  return names;
}

void validate(const ExperimentConfig& c) {
  if (c.policies.empty()) throw ConfigError("config: at least one policy is required");
  for (const auto& p : c.policies) {
    if (std::find(known_policies().begin(), known_policies().end(), p) == known_policies().end()) {
      throw ConfigError("config: unknown policy '" + p + "'");
    }
  }
  if (std::set<std::string>(c.policies.begin(), c.policies.end()).size() != c.policies.size()) {
    throw ConfigError("config: duplicate policy");
  }
  if (c.evaluation_chains < 1) throw ConfigError("config: evaluation chain count must be >= 1");
  if (c.tuning_chains < 1) throw ConfigError("config: tuning chain count must be >= 1");
  if (c.workers < 1) throw ConfigError("config: workers must be >= 1");
  if (c.sweep_exploration.empty() || c.sweep_iterations.empty()) throw ConfigError("config: sweep grid is empty");
  if (c.latency_iterations.empty()) throw ConfigError("config: latency iteration counts are empty");
  if (c.latency_epochs < 1) throw ConfigError("config: latency epochs must be >= 1");
  if (!(c.latency_budget_s > 0.0)) throw ConfigError("config: latency budget must be > 0");
  for (double e : c.sweep_exploration) {
    if (!(e > 0.0)) throw ConfigError("config: sweep exploration values must be > 0");
  }
  for (auto i : c.sweep_iterations) {
    if (i < 1) throw ConfigError("config: sweep iteration counts must be >= 1");
  }
  for (auto i : c.latency_iterations) {
    if (i < 1) throw ConfigError("config: latency iteration counts must be >= 1");
  }
  validate(c.sim);
  validate(c.search);
  validate(c.annealing);
  if (!(c.evaluation_weights.discount > 0.0 && c.evaluation_weights.discount <= 1.0)) {
    throw ConfigError("config: evaluation discount must be in (0, 1]");
  }
  if (c.scenario_dir.empty()) check_generator_spec(c.generator);
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base) {
  const json doc = detail::parse_json(in, "config");
  detail::check_version(doc, "config");
  check_keys(doc,
             {"version", "seed", "scenario", "policies", "chains", "simulator", "search", "annealing", "evaluation",
              "agency_plan", "out", "workers", "event_log", "sweep", "latency"},
             "config");
  ExperimentConfig c;
  const std::string w = "config";
  read(doc, "seed", c.seed, w);
  read(doc, "policies", c.policies, w);
  read(doc, "workers", c.workers, w);
  read(doc, "event_log", c.event_log, w);
  if (auto it = doc.find("agency_plan"); it != doc.end()) c.agency_plan = resolve(base, detail::get_as<std::string>(*it, w));
  if (auto it = doc.find("out"); it != doc.end()) c.out_dir = resolve(base, detail::get_as<std::string>(*it, w));

  if (auto it = doc.find("scenario"); it != doc.end()) {
    check_keys(*it, {"dir", "generator", "seed"}, "config.scenario");
    if (auto d = it->find("dir"); d != it->end()) c.scenario_dir = resolve(base, detail::get_as<std::string>(*d, w));
    if (auto g = it->find("generator"); g != it->end()) generator_from_json(*g, c.generator);
    read(*it, "seed", c.generator_seed, "config.scenario");
  }
  if (auto it = doc.find("chains"); it != doc.end()) {
    check_keys(*it, {"evaluation", "tuning"}, "config.chains");
    read(*it, "evaluation", c.evaluation_chains, "config.chains");
    read(*it, "tuning", c.tuning_chains, "config.chains");
  }
  if (auto it = doc.find("simulator"); it != doc.end()) {
    const std::string ws = "config.simulator";
    check_keys(*it,
               {"dispatch_interval_s", "stationing_interval_s", "passenger_wait_s", "deadhead_speed_kmh",
                "remain_probability"},
               ws);
    read(*it, "dispatch_interval_s", c.sim.dispatch_interval, ws);
    read(*it, "stationing_interval_s", c.sim.stationing_interval, ws);
    read(*it, "passenger_wait_s", c.sim.passenger_wait, ws);
    read(*it, "deadhead_speed_kmh", c.sim.deadhead_speed_kmh, ws);
    read(*it, "remain_probability", c.sim.remain_probability, ws);
  }
  if (auto it = doc.find("search"); it != doc.end()) {
    const std::string ws = "config.search";
    check_keys(*it, {"exploration", "iterations", "horizon_s", "chains", "alpha", "beta", "discount", "workers"}, ws);
    read(*it, "exploration", c.search.exploration, ws);
    read(*it, "iterations", c.search.iterations, ws);
    read(*it, "horizon_s", c.search.horizon, ws);
    read(*it, "chains", c.search.chains, ws);
    read(*it, "alpha", c.search.weights.alpha, ws);
    read(*it, "beta", c.search.weights.beta, ws);
    read(*it, "discount", c.search.weights.discount, ws);
    read(*it, "workers", c.search.workers, ws);
  }
  if (auto it = doc.find("annealing"); it != doc.end()) {
    const std::string ws = "config.annealing";
    check_keys(*it, {"initial_temperature", "cooling", "iterations"}, ws);
    read(*it, "initial_temperature", c.annealing.initial_temperature, ws);
    read(*it, "cooling", c.annealing.cooling, ws);
    read(*it, "iterations", c.annealing.iterations, ws);
  }
  if (auto it = doc.find("evaluation"); it != doc.end()) {
    const std::string ws = "config.evaluation";
    check_keys(*it, {"alpha", "beta", "discount"}, ws);
    read(*it, "alpha", c.evaluation_weights.alpha, ws);
    read(*it, "beta", c.evaluation_weights.beta, ws);
    read(*it, "discount", c.evaluation_weights.discount, ws);
  }
  if (auto it = doc.find("sweep"); it != doc.end()) {
    check_keys(*it, {"exploration", "iterations"}, "config.sweep");
    read(*it, "exploration", c.sweep_exploration, "config.sweep");
    read(*it, "iterations", c.sweep_iterations, "config.sweep");
  }
  if (auto it = doc.find("latency"); it != doc.end()) {
    check_keys(*it, {"iterations", "epochs", "budget_s"}, "config.latency");
    read(*it, "iterations", c.latency_iterations, "config.latency");
    read(*it, "epochs", c.latency_epochs, "config.latency");
    read(*it, "budget_s", c.latency_budget_s, "config.latency");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  json scenario = {{"seed", c.generator_seed}};
  if (c.scenario_dir.empty()) {
    scenario["generator"] = generator_to_json(c.generator);
  } else {
    scenario["dir"] = c.scenario_dir.string();
  }
  json doc{
      {"version", 1},
      {"seed", c.seed},
      {"scenario", scenario},
      {"policies", c.policies},
      {"chains", {{"evaluation", c.evaluation_chains}, {"tuning", c.tuning_chains}}},
      {"simulator",
       {{"dispatch_interval_s", c.sim.dispatch_interval},
        {"stationing_interval_s", c.sim.stationing_interval},
        {"passenger_wait_s", c.sim.passenger_wait},
        {"deadhead_speed_kmh", c.sim.deadhead_speed_kmh},
        {"remain_probability", c.sim.remain_probability}}},
      {"search",
       {{"exploration", c.search.exploration},
        {"iterations", c.search.iterations},
        {"horizon_s", c.search.horizon},
        {"chains", c.search.chains},
        {"alpha", c.search.weights.alpha},
        {"beta", c.search.weights.beta},
        {"discount", c.search.weights.discount},
        {"workers", c.search.workers}}},
      {"annealing",
       {{"initial_temperature", c.annealing.initial_temperature},
        {"cooling", c.annealing.cooling},
        {"iterations", c.annealing.iterations}}},
      {"evaluation",
       {{"alpha", c.evaluation_weights.alpha},
        {"beta", c.evaluation_weights.beta},
        {"discount", c.evaluation_weights.discount}}},
      {"out", c.out_dir.string()},
      {"workers", c.workers},
      {"event_log", c.event_log},
      {"sweep", {{"exploration", c.sweep_exploration}, {"iterations", c.sweep_iterations}}},
      {"latency",
       {{"iterations", c.latency_iterations}, {"epochs", c.latency_epochs}, {"budget_s", c.latency_budget_s}}},
  };
  if (!c.agency_plan.empty()) doc["agency_plan"] = c.agency_plan.string();
  out << doc.dump(2) << '\n';
}

Scenario build_scenario(const ExperimentConfig& c) {
  if (!c.scenario_dir.empty()) return load_scenario(c.scenario_dir);
  return synthesize_scenario(c.generator, c.generator_seed);
}

std::uint64_t evaluation_chain_seed(const ExperimentConfig& c, std::size_t k) {
  return derive_seed(c.seed, SeedStream::Evaluation, k);
}

std::vector<EventChain> evaluation_chains(const Scenario& scenario, const ExperimentConfig& c) {
  std::vector<EventChain> out;
  for (std::int32_t k = 0; k < c.evaluation_chains; ++k) {
    out.push_back(sample_event_chain(scenario, evaluation_chain_seed(c, static_cast<std::size_t>(k))));
  }
  return out;
}

std::vector<EventChain> tuning_chains(const Scenario& scenario, const ExperimentConfig& c) {
  std::vector<EventChain> out;
  for (std::int32_t k = 0; k < c.tuning_chains; ++k) {
    out.push_back(sample_event_chain(scenario, derive_seed(c.seed, SeedStream::Tuning, static_cast<std::uint64_t>(k))));
  }
  return out;
}

// --- statistics ----------------------------------------------------------------------

Stat summarize(const std::vector<double>& values) {
  Stat s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stdev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

// Nearest-rank percentile.
double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

PolicySummary summarize_policy(const std::string& policy, const std::vector<PolicyRun>& runs) {
  PolicySummary s;
  s.policy = policy;
  std::vector<double> served, left, generated, deadhead, regular, rew, epochs, dispatches, stationings, latency;
  for (const PolicyRun& r : runs) {
    if (r.policy != policy) continue;
    if (!r.result) {
      ++s.failures;
      continue;
    }
    ++s.runs;
    const RunMetrics& m = r.result->metrics;
    served.push_back(static_cast<double>(m.served));
    left.push_back(static_cast<double>(m.left));
    generated.push_back(static_cast<double>(m.generated));
    deadhead.push_back(m.total_deadhead_km);
    regular.push_back(m.regular_km);
    rew.push_back(m.reward);
    epochs.push_back(static_cast<double>(m.epochs));
    dispatches.push_back(static_cast<double>(m.dispatches));
    stationings.push_back(static_cast<double>(m.stationings));
    latency.insert(latency.end(), m.latency_ms.begin(), m.latency_ms.end());
  }
  s.served = summarize(served);
  s.left = summarize(left);
  s.generated = summarize(generated);
  s.deadhead_km = summarize(deadhead);
  s.regular_km = summarize(regular);
  s.reward = summarize(rew);
  s.epochs = summarize(epochs);
  s.dispatches = summarize(dispatches);
  s.stationings = summarize(stationings);
  s.latency_mean_ms = summarize(latency).mean;
  s.latency_p95_ms = percentile(latency, 0.95);
  return s;
}

std::string format_number(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, value);
  std::string s = buf;
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
    std::snprintf(buf, sizeof buf, "%.*f", precision, 0.0);
    s = buf;
  }
  return s;
}

std::string describe(const Action& action, const TransitSchedule& s) {
  if (const auto* d = std::get_if<Dispatch>(&action)) {
    return "dispatch " + s.vehicle(d->vehicle).id + " to " + s.trip(d->trip).id + "#" + std::to_string(d->stop_index);
  }
  if (const auto* st = std::get_if<Station>(&action)) {
    return "station " + s.vehicle(st->vehicle).id + " at " + s.stop(st->site).id;
  }
  return "no action";
}

// --- experiment ------------------------------------------------------------------------

ExperimentResult run_experiment(const ExperimentConfig& config, const Scenario& scenario,
                                std::span<const EventChain> evaluation, std::span<const EventChain> tuning) {
  validate(config);
  ExperimentResult result;
  for (const std::string& label : needed_plans(config.policies)) {
    PlanInputs inputs;
    inputs.agency_file = config.agency_plan;
    inputs.tuning_chains = tuning;
    inputs.annealing = config.annealing;
    inputs.sim_config = config.sim;
    inputs.weights = config.evaluation_weights;
    inputs.seed = derive_seed(config.seed, SeedStream::Annealing, 1);
    result.plans.push_back(make_plan(parse_plan_kind(label), scenario, inputs));
  }
  const PolicyFactory factory{config, scenario, result.plans};

  for (const std::string& p : config.policies) {
    for (std::size_t k = 0; k < evaluation.size(); ++k) {
      result.runs.push_back(PolicyRun{p, k, evaluation[k].seed, std::nullopt, {}});
    }
  }
  parallel_for(result.runs.size(), static_cast<std::size_t>(config.workers), [&](std::size_t i) {
    PolicyRun& run = result.runs[i];
    try {
      auto [policy, placement] = factory.make(run.policy, run.chain);
      RunOptions options;
      options.traffic_seed = derive_seed(config.seed, SeedStream::Traffic, run.chain);
      options.placement = std::move(placement);
      options.keep_log = config.event_log;
      options.weights = config.evaluation_weights;
      run.result = run_day(scenario, evaluation[run.chain], config.sim, *policy, options);
    } catch (const std::exception& e) {
      run.error = e.what();
    }
  });
  for (const std::string& p : config.policies) result.summaries.push_back(summarize_policy(p, result.runs));
  return result;
}

void write_experiment(const ExperimentConfig& config, const Scenario& scenario, const ExperimentResult& result) {
  const TransitSchedule& sch = scenario.schedule;
  const auto& out = config.out_dir;
  std::filesystem::create_directories(out / "runs");

  {
    auto csv = open_out(out / "metrics.csv");
    csv << "policy,runs,failures,served_mean,served_std,left_mean,left_std,generated_mean,deadhead_km_mean,"
           "deadhead_km_std,regular_km_mean,reward_mean,reward_std,epochs_mean,dispatches_mean,stationings_mean\n";
    for (const PolicySummary& s : result.summaries) {
      csv << s.policy << ',' << s.runs << ',' << s.failures << ',' << format_number(s.served.mean) << ','
          << format_number(s.served.stdev) << ',' << format_number(s.left.mean) << ',' << format_number(s.left.stdev)
          << ',' << format_number(s.generated.mean) << ',' << format_number(s.deadhead_km.mean) << ','
          << format_number(s.deadhead_km.stdev) << ',' << format_number(s.regular_km.mean) << ','
          << format_number(s.reward.mean) << ',' << format_number(s.reward.stdev) << ','
          << format_number(s.epochs.mean) << ',' << format_number(s.dispatches.mean) << ','
          << format_number(s.stationings.mean) << '\n';
    }
  }
  {
    auto csv = open_out(out / "runs.csv");
    csv << "policy,chain,chain_seed,status,served,left,generated,delivered,deadhead_km,regular_km,reward,epochs,"
           "dispatches,stationings\n";
    for (const PolicyRun& r : result.runs) {
      csv << r.policy << ',' << r.chain << ',' << r.chain_seed << ',';
      if (!r.result) {
        csv << "failed,,,,,,,,,,\n";
        continue;
      }
      const RunMetrics& m = r.result->metrics;
      csv << "ok," << m.served << ',' << m.left << ',' << m.generated << ',' << m.delivered << ','
          << format_number(m.total_deadhead_km) << ',' << format_number(m.regular_km) << ','
          << format_number(m.reward) << ',' << m.epochs << ',' << m.dispatches << ',' << m.stationings << '\n';
    }
  }
  for (const PolicyRun& r : result.runs) {
    auto jl = open_out(out / "runs" / run_file_name(r.policy, r.chain));
    if (!r.result) {
      jl << json{{"type", "error"}, {"policy", r.policy}, {"chain", r.chain}, {"message", r.error}}.dump() << '\n';
      continue;
    }
    const RunResult& rr = *r.result;
    for (const LogRecord& rec : rr.log) {
      if (std::string_view(rec.kind) == "decision") {
        const DecisionRecord& dr = rr.decisions[static_cast<std::size_t>(rec.group)];
        json values = json::array();
        for (const auto& [a, v] : dr.values) values.push_back({{"action", action_json(a, sch)}, {"value", v}});
        jl << json{{"type", "decision"},
                   {"t", dr.time},
                   {"trigger", trigger_json(dr.trigger, sch)},
                   {"candidates", dr.candidates},
                   {"action", action_json(dr.action, sch)},
                   {"values", values},
                   {"latency_ms", dr.latency_ms}}
                  .dump()
           << '\n';
        continue;
      }
      jl << log_json(rec, sch).dump() << '\n';
    }
    const RunMetrics& m = rr.metrics;
    json deadhead = json::object();
    for (std::size_t i = 0; i < sch.substitutes().size(); ++i) {
      deadhead[sch.vehicle(sch.substitutes()[i]).id] = m.deadhead_km[i];
    }
    jl << json{{"type", "summary"},
               {"policy", r.policy},
               {"chain", r.chain},
               {"chain_seed", r.chain_seed},
               {"served", m.served},
               {"left", m.left},
               {"generated", m.generated},
               {"delivered", m.delivered},
               {"deadhead_km", deadhead},
               {"total_deadhead_km", m.total_deadhead_km},
               {"regular_km", m.regular_km},
               {"reward", m.reward},
               {"epochs", m.epochs},
               {"dispatches", m.dispatches},
               {"stationings", m.stationings},
               {"events", m.events},
               {"wall_ms", m.wall_ms}}
              .dump()
       << '\n';
  }
  {
    json plans = json::object();
    for (const StationingPlan& p : result.plans) {
      json a = json::object();
      for (const auto& [v, site] : p.assignments) a[sch.vehicle(v).id] = sch.stop(site).id;
      plans[p.label] = a;
    }
    detail::save_json(out / "plans.json", plans);
  }
  {
    json policies = json::array();
    const PolicySummary* garage = nullptr;
    for (const PolicySummary& s : result.summaries) {
      if (s.policy == "greedy-garage") garage = &s;
    }
    for (const PolicySummary& s : result.summaries) {
      json j{{"policy", s.policy},
             {"runs", s.runs},
             {"failures", s.failures},
             {"served", {{"mean", s.served.mean}, {"std", s.served.stdev}}},
             {"left", {{"mean", s.left.mean}, {"std", s.left.stdev}}},
             {"deadhead_km", {{"mean", s.deadhead_km.mean}, {"std", s.deadhead_km.stdev}}},
             {"reward", {{"mean", s.reward.mean}, {"std", s.reward.stdev}}},
             {"latency_ms", {{"mean", s.latency_mean_ms}, {"p95", s.latency_p95_ms}}}};
      if (garage && garage->served.mean > 0.0) {
        j["served_vs_garage"] = s.served.mean / garage->served.mean - 1.0;
      }
      if (garage && garage->deadhead_km.mean > 0.0) {
        j["deadhead_vs_garage"] = s.deadhead_km.mean / garage->deadhead_km.mean;
      }
      policies.push_back(std::move(j));
    }
    json failures = json::array();
    for (const PolicyRun& r : result.runs) {
      if (!r.result) failures.push_back({{"policy", r.policy}, {"chain", r.chain}, {"error", r.error}});
    }
    std::ostringstream cfg;
    write_config(cfg, config);
    detail::save_json(out / "summary.json",
                      {{"seed", config.seed},
                       {"evaluation_chains", config.evaluation_chains},
                       {"policies", policies},
                       {"failures", failures},
                       {"config", json::parse(cfg.str())}});
  }
}

// --- sweep --------------------------------------------------------------------------------

std::vector<SweepCell> sweep(const ExperimentConfig& config, const Scenario& scenario,
                             std::span<const EventChain> tuning) {
  validate(config);
  ExperimentConfig base = config;
  base.event_log = false;
  base.policies = {"greedy-garage"};
  const ExperimentResult greedy = run_experiment(base, scenario, tuning, tuning);
  const double baseline = greedy.summaries.front().served.mean;

  std::vector<SweepCell> cells;
  for (double c : config.sweep_exploration) {
    for (std::int32_t it : config.sweep_iterations) {
      ExperimentConfig cell = base;
      cell.policies = {"mcts"};
      cell.search.exploration = c;
      cell.search.iterations = it;
      const ExperimentResult r = run_experiment(cell, scenario, tuning, tuning);
      const PolicySummary& s = r.summaries.front();
      SweepCell out;
      out.exploration = c;
      out.iterations = it;
      out.served_mean = s.served.mean;
      out.baseline_served_mean = baseline;
      out.improvement = baseline > 0.0 ? s.served.mean / baseline - 1.0 : 0.0;
      out.deadhead_mean = s.deadhead_km.mean;
      out.latency_mean_ms = s.latency_mean_ms;
      cells.push_back(out);
    }
  }
  auto better = [](const SweepCell& a, const SweepCell& b) {
    if (a.improvement != b.improvement) return a.improvement > b.improvement;
    return a.latency_mean_ms < b.latency_mean_ms;
  };
  if (!cells.empty()) {
    auto best = cells.begin();
    for (auto it = cells.begin(); it != cells.end(); ++it) {
      if (better(*it, *best)) best = it;
    }
    best->selected = true;
  }
  return cells;
}

void write_sweep(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << "exploration,iterations,served_mean,baseline_served_mean,improvement,deadhead_km_mean,latency_mean_ms,"
         "selected\n";
  for (const SweepCell& c : cells) {
    out << format_number(c.exploration, 3) << ',' << c.iterations << ',' << format_number(c.served_mean) << ','
        << format_number(c.baseline_served_mean) << ',' << format_number(c.improvement) << ','
        << format_number(c.deadhead_mean) << ',' << format_number(c.latency_mean_ms, 3) << ','
        << (c.selected ? 1 : 0) << '\n';
  }
}

// --- latency ------------------------------------------------------------------------------

std::vector<LatencyRow> measure_epoch_latency(const ExperimentConfig& config, const Scenario& scenario,
                                              std::span<const EventChain> evaluation) {
  validate(config);
  if (evaluation.empty()) throw ConfigError("latency measurement needs an evaluation chain");
  const Simulator sim(scenario, evaluation.front(), config.sim);
  WorldState state = sim.initial_state(derive_seed(config.seed, SeedStream::Traffic, 0));
  GreedyPolicy greedy;
  std::vector<std::pair<WorldState, DecisionEpoch>> epochs;
  while (!sim.done(state)) {
    auto epoch = sim.step(state);
    if (!epoch) continue;
    epochs.emplace_back(state, *epoch);
    sim.apply_action(state, greedy.choose(*epoch, state, sim).action);
  }
  // Evenly spaced over the day.
  std::vector<std::size_t> picks;
  const std::size_t want = std::min(epochs.size(), static_cast<std::size_t>(config.latency_epochs));
  for (std::size_t i = 0; i < want; ++i) picks.push_back(i * epochs.size() / want);

  std::vector<EventChain> chains;
  for (std::int32_t k = 0; k < config.search.chains; ++k) {
    chains.push_back(sample_event_chain(
        scenario, derive_seed(derive_seed(config.seed, SeedStream::Planning, 0), static_cast<std::uint64_t>(k))));
  }
  std::vector<LatencyRow> rows;
  for (std::int32_t iterations : config.latency_iterations) {
    SearchConfig c = config.search;
    c.iterations = iterations;
    std::vector<double> ms;
    for (std::size_t i : picks) {
      c.seed = derive_seed(config.seed, SeedStream::Tree, i);
      const auto t0 = std::chrono::steady_clock::now();
      (void)decide(scenario, config.sim, epochs[i].first, epochs[i].second, chains, c);
      ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    LatencyRow row;
    row.iterations = iterations;
    row.epochs = static_cast<std::int32_t>(ms.size());
    row.mean_ms = summarize(ms).mean;
    row.p95_ms = percentile(ms, 0.95);
    row.max_ms = ms.empty() ? 0.0 : *std::max_element(ms.begin(), ms.end());
    row.over_budget = row.p95_ms > config.latency_budget_s * 1000.0;
    rows.push_back(row);
  }
  return rows;
}

void write_latency(std::ostream& out, const std::vector<LatencyRow>& rows, double budget_s) {
  out << "iterations,epochs,mean_ms,p95_ms,max_ms,budget_s,over_budget\n";
  for (const LatencyRow& r : rows) {
    out << r.iterations << ',' << r.epochs << ',' << format_number(r.mean_ms, 3) << ',' << format_number(r.p95_ms, 3)
        << ',' << format_number(r.max_ms, 3) << ',' << format_number(budget_s, 1) << ',' << (r.over_budget ? 1 : 0)
        << '\n';
  }
}

}  // namespace stationing
