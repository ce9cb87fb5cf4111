#include "stationing/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>

#include "json_util.hpp"

namespace stationing {

using detail::json;

StationingPlan garage_plan(const TransitSchedule& schedule) {
  StationingPlan plan{"GARAGE", {}};
  for (VehicleId v : schedule.substitutes()) plan.assignments[v] = schedule.garage;
  return plan;
}

std::vector<std::string> plan_violations(const StationingPlan& plan, const TransitSchedule& schedule) {
  std::vector<std::string> out;
  for (const auto& [v, site] : plan.assignments) {
    if (!v.valid() || v.index() >= schedule.vehicles.size() ||
        schedule.vehicle(v).kind != VehicleKind::Substitute) {
      out.push_back("plan assigns a vehicle that is not a substitute");
      continue;
    }
    if (!schedule.can_stage_at(site)) out.push_back(schedule.vehicle(v).id + " is assigned to a non-staging stop");
  }
  for (VehicleId v : schedule.substitutes()) {
    if (!plan.assignments.contains(v)) out.push_back(schedule.vehicle(v).id + " has no assignment");
  }
  return out;
}

StationingPlan read_plan(std::istream& in, const TransitSchedule& schedule, std::string label) {
  const json doc = detail::parse_json(in, "stationing plan");
  const json& map = doc.contains("assignments") ? doc.at("assignments") : doc;
  if (!map.is_object()) throw ConfigError("stationing plan: expected an object mapping vehicle id to site id");
  StationingPlan plan{std::move(label), {}};
  for (auto it = map.begin(); it != map.end(); ++it) {
    const auto v = schedule.find_vehicle(it.key());
    if (!v) throw ConfigError("stationing plan: unknown vehicle '" + it.key() + "'");
    if (!it->is_string()) throw ConfigError("stationing plan: site for " + it.key() + " must be a stop id");
    const auto site = schedule.find_stop(it->get<std::string>());
    if (!site) throw ConfigError("stationing plan: unknown stop '" + it->get<std::string>() + "'");
    plan.assignments[*v] = *site;
  }
  if (auto problems = plan_violations(plan, schedule); !problems.empty()) {
    throw ConfigError("stationing plan: " + problems.front());
  }
  return plan;
}

StationingPlan load_plan(const std::filesystem::path& path, const TransitSchedule& schedule, std::string label) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stationing plan " + path.string());
  return read_plan(in, schedule, std::move(label));
}

void write_plan(std::ostream& out, const StationingPlan& plan, const TransitSchedule& schedule) {
  json doc = json::object();
  for (const auto& [v, site] : plan.assignments) doc[schedule.vehicle(v).id] = schedule.stop(site).id;
  out << doc.dump(2) << '\n';
}

Decision GreedyPolicy::choose(const DecisionEpoch& epoch, const WorldState& state, const Simulator&) {
  if (std::holds_alternative<PeriodicTrigger>(epoch.trigger)) return {NoAction{}, {}};
  if (const auto* o = std::get_if<OverageTrigger>(&epoch.trigger)) {
    const std::int32_t capacity = state.vehicles[o->vehicle.index()].capacity;
    if (o->left_behind < threshold(capacity, threshold_percent_)) return {NoAction{}, {}};
  }
  return {nearest_dispatch(epoch), {}};
}

void validate(const AnnealingParams& p) {
  if (!(p.initial_temperature >= 0.0)) throw ConfigError("annealing: initial temperature must be >= 0");
  if (!(p.cooling > 0.0 && p.cooling <= 1.0)) throw ConfigError("annealing: cooling must be in (0, 1]");
  if (p.iterations < 0) throw ConfigError("annealing: iterations must be >= 0");
}

double plan_objective(const Scenario& scenario, const SimConfig& config, std::span<const EventChain> chains,
                      const StationingPlan& plan, const RewardWeights& weights, std::uint64_t seed) {
  if (chains.empty()) throw ConfigError("plan objective needs at least one chain");
  double total = 0.0;
  for (std::size_t k = 0; k < chains.size(); ++k) {
    GreedyPolicy greedy;
    RunOptions options;
    options.traffic_seed = derive_seed(seed, SeedStream::Traffic, k);
    options.placement = plan.assignments;
    options.weights = weights;
    total += run_day(scenario, chains[k], config, greedy, options).metrics.reward;
  }
  return total / static_cast<double>(chains.size());
}

StationingPlan search_stationing(const Scenario& scenario, const SimConfig& config, std::span<const EventChain> chains,
                                 const AnnealingParams& params, const RewardWeights& weights, std::uint64_t seed,
                                 AnnealingTrace* trace) {
  validate(params);
  if (chains.empty()) throw ConfigError("stationing search needs at least one chain");
  const TransitSchedule& sch = scenario.schedule;
  const auto& subs = sch.substitutes();
  const auto& sites = sch.stationing_sites;

  std::map<Placement, double> memo;
  auto objective = [&](const StationingPlan& p) {
    auto [it, fresh] = memo.try_emplace(p.assignments, 0.0);
    if (fresh) {
      it->second = plan_objective(scenario, config, chains, p, weights, seed);
      if (trace) ++trace->evaluations;
    }
    return it->second;
  };

  StationingPlan current = garage_plan(sch);
  double current_value = objective(current);
  StationingPlan best = current;
  double best_value = current_value;
  Rng rng(derive_seed(seed, SeedStream::Annealing, 0));
  double temperature = params.initial_temperature;

  for (std::int32_t i = 0; i < params.iterations && !subs.empty() && !sites.empty(); ++i) {
    StationingPlan candidate = current;
    const VehicleId v = subs[rng.index(subs.size())];
    candidate.assignments[v] = sites[rng.index(sites.size())];
    const double value = objective(candidate);
    const double delta = value - current_value;
    bool accept = delta >= 0.0;
    if (!accept && temperature > 0.0) accept = rng.uniform01() < std::exp(delta / temperature);
    if (accept) {
      current = std::move(candidate);
      current_value = value;
    }
    if (current_value > best_value) {
      best = current;
      best_value = current_value;
    }
    temperature *= params.cooling;
    if (trace) {
      trace->current.push_back(current_value);
      trace->best.push_back(best_value);
    }
  }
  best.label = "SEARCH";
  return best;
}

PlanKind parse_plan_kind(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (t == "GARAGE") return PlanKind::Garage;
  if (t == "AGENCY") return PlanKind::Agency;
  if (t == "SEARCH") return PlanKind::Search;
  throw ConfigError("unknown stationing plan '" + text + "' (expected GARAGE, AGENCY or SEARCH)");
}

StationingPlan make_plan(PlanKind kind, const Scenario& scenario, const PlanInputs& in) {
  switch (kind) {
    case PlanKind::Garage: return garage_plan(scenario.schedule);
    case PlanKind::Agency:
      if (in.agency_file.empty()) throw ConfigError("AGENCY plan requires an assignment file");
      return load_plan(in.agency_file, scenario.schedule, "AGENCY");
    case PlanKind::Search:
      return search_stationing(scenario, in.sim_config, in.tuning_chains, in.annealing, in.weights, in.seed);
  }
  throw ConfigError("unknown plan kind");
}

}  // namespace stationing
