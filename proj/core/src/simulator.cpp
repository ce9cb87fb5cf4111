#include "stationing/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace stationing {

void validate(const SimConfig& c) {
  if (c.dispatch_interval <= 0) throw ConfigError("dispatch_interval must be > 0");
  if (c.stationing_interval <= 0) throw ConfigError("stationing_interval must be > 0");
  if (c.passenger_wait <= 0) throw ConfigError("passenger_wait must be > 0");
  if (!(c.deadhead_speed_kmh > 0.0)) throw ConfigError("deadhead_speed_kmh must be > 0");
  if (!(c.remain_probability >= 0.0 && c.remain_probability <= 1.0)) {
    throw ConfigError("remain_probability must be in [0, 1]");
  }
}

const char* trigger_name(const EpochTrigger& trigger) {
  switch (trigger.index()) {
    case 0: return "overage";
    case 1: return "breakdown";
    default: return "periodic";
  }
}

Simulator::Simulator(const Scenario& scenario, const EventChain& chain, SimConfig config)
    : scenario_(&scenario), chain_(&chain), config_(config) {
  validate(config_);
  const std::size_t trips = scenario.schedule.trips.size();
  if (chain.occupancy.size() != trips || chain.disruption_stop.size() != trips ||
      chain.disruption_time.size() != trips) {
    throw ConfigError("event chain does not match the schedule's trips");
  }
}

Seconds Simulator::deadhead_seconds(double km) const {
  if (km <= 0.0) return 0;
  return static_cast<Seconds>(std::ceil(km * 3600.0 / config_.deadhead_speed_kmh - 1e-9));
}

WorldState Simulator::initial_state(std::uint64_t traffic_seed, const Placement& placement) const {
  const TransitSchedule& sch = schedule();
  WorldState s;
  s.traffic_seed = traffic_seed;
  s.trip_cover.assign(sch.trips.size(), VehicleId{});
  s.vehicles.resize(sch.vehicles.size());
  for (std::size_t i = 0; i < sch.vehicles.size(); ++i) {
    const VehicleId v(i);
    VehicleState& vs = s.vehicles[i];
    vs.kind = sch.vehicles[i].kind;
    vs.capacity = sch.vehicles[i].capacity;
    vs.location = sch.garage;
    if (vs.kind == VehicleKind::Substitute) {
      if (auto it = placement.find(v); it != placement.end()) {
        if (!sch.can_stage_at(it->second)) {
          throw ConfigError("placement of " + sch.vehicles[i].id + " is not a stationing site");
        }
        vs.location = it->second;
      }
      continue;
    }
    const auto& own = sch.trips_of(v);
    if (own.empty()) continue;
    const Trip& first = sch.trip(own.front());
    vs.duty = Duty::Schedule;
    vs.duty_source = v;
    vs.duty_cursor = 0;
    vs.trip = own.front();
    vs.stop_index = 0;
    vs.status = VehicleStatus::InTransit;
    vs.location = first.stops.front().stop;
    s.schedule(SimEvent{first.start(), EventKind::BusArrival, v.value, own.front(), 0, 0, 0});
  }
  for (const auto& [v, site] : placement) {
    if (!v.valid() || v.index() >= sch.vehicles.size() || sch.vehicle(v).kind != VehicleKind::Substitute) {
      throw ConfigError("placement names a vehicle that is not a substitute");
    }
    (void)site;
  }
  if (!sch.substitutes().empty() && !sch.trips.empty()) {
    s.schedule(SimEvent{sch.service_start(), EventKind::StationingEpoch, -1, TripId{}, -1, 0, 0});
  }
  s.tally.reset(0, 1.0);
  return s;
}

bool Simulator::breaks_on(const WorldState& s, VehicleId v, TripId trip, std::int32_t stop_index) const {
  const VehicleState& vs = s.vehicles[v.index()];
  return vs.kind == VehicleKind::Regular && vs.duty == Duty::Schedule && vs.duty_source == v &&
         chain_->disruption_stop[trip.index()] == stop_index;
}

Seconds Simulator::breakdown_time(const WorldState& s, TripId trip, Seconds arrival) const {
  const Seconds lo = s.clock + 1;
  const Seconds hi = std::max(lo, arrival - 1);
  return std::clamp(chain_->disruption_time[trip.index()], lo, hi);
}

void Simulator::rebind(WorldState& s) const {
  const auto& arr = chain_->arrivals;
  s.next_arrival = static_cast<std::size_t>(
      std::upper_bound(arr.begin(), arr.end(), s.clock, [](Seconds t, const PassengerArrival& a) { return t < a.time; }) -
      arr.begin());
  s.pending.rewrite([&](SimEvent& e) {
    if (e.kind == EventKind::Disruption) {
      if (breaks_on(s, VehicleId(e.entity), e.trip, e.stop_index)) {
        e.time = breakdown_time(s, e.trip, e.aux);
      } else {
        e.kind = EventKind::BusArrival;
        e.time = e.aux;
      }
    } else if (e.kind == EventKind::BusArrival && e.stop_index >= 1 &&
               breaks_on(s, VehicleId(e.entity), e.trip, e.stop_index)) {
      e.kind = EventKind::Disruption;
      e.aux = e.time;
      e.time = breakdown_time(s, e.trip, e.aux);
    }
  });
}

bool Simulator::done(const WorldState& s) const {
  return s.pending.empty() && s.next_arrival >= chain_->arrivals.size();
}

Seconds Simulator::next_event_time(const WorldState& s) const {
  Seconds t = std::numeric_limits<Seconds>::max();
  if (!s.pending.empty()) t = s.pending.top().time;
  if (s.next_arrival < chain_->arrivals.size()) t = std::min(t, chain_->arrivals[s.next_arrival].time);
  return t;
}

std::optional<DecisionEpoch> Simulator::step(WorldState& s, EventLog* log) const {
  if (done(s)) return std::nullopt;
  const auto& arr = chain_->arrivals;
  if (s.next_arrival < arr.size() && (s.pending.empty() || arr[s.next_arrival].time <= s.pending.top().time)) {
    const PassengerArrival& a = arr[s.next_arrival++];
    if (a.time < s.clock) throw ConsistencyError("passenger arrival precedes the clock");
    s.clock = a.time;
    return on_passenger_arrival(s, a, log);
  }
  const SimEvent e = s.pending.pop();
  if (e.time < s.clock) throw ConsistencyError(std::string("event in the past: ") + to_string(e.kind));
  s.clock = e.time;
  switch (e.kind) {
    case EventKind::PassengerArrival: break;
    case EventKind::Disruption: return on_disruption(s, e, log);
    case EventKind::DispatchArrival: return on_dispatch_arrival(s, e, log);
    case EventKind::BusArrival: return on_bus_arrival(s, e, log);
    case EventKind::PassengerLeave: return on_passenger_leave(s, e, log);
    case EventKind::StationingEpoch: return on_stationing_epoch(s, log);
  }
  return std::nullopt;
}

std::optional<DecisionEpoch> Simulator::advance(WorldState& s, Seconds until, EventLog* log) const {
  while (!done(s)) {
    if (next_event_time(s) > until) return std::nullopt;
    if (auto epoch = step(s, log)) return epoch;
  }
  return std::nullopt;
}

// --- event handlers ------------------------------------------------------------

std::optional<DecisionEpoch> Simulator::on_passenger_arrival(WorldState& s, const PassengerArrival& a,
                                                             EventLog* log) const {
  PassengerGroup g{s.next_group_id++, a.stop, a.service, a.count, a.time, a.time + config_.passenger_wait};
  s.generated += a.count;
  s.waiting.push_back(g);
  s.schedule(SimEvent{g.deadline, EventKind::PassengerLeave, g.id, a.trip, a.stop_index, 0, 0});
  if (log) {
    LogRecord r = LogRecord::at(a.time, "passenger_arrival");
    r.trip = a.trip;
    r.stop_index = a.stop_index;
    r.stop = a.stop;
    r.group = g.id;
    r.count = a.count;
    log->push_back(r);
  }
  return std::nullopt;
}

BoardingResult Simulator::board_and_alight(WorldState& s, VehicleId v, TripId trip, std::int32_t j) const {
  VehicleState& vs = s.vehicles[v.index()];
  const Trip& t = schedule().trip(trip);
  BoardingResult r;

  if (j == t.last_index()) {
    std::int32_t remain = 0;
    if (config_.remain_probability > 0.0 && has_next_trip(s, v)) {
      Rng rng(derive_seed(derive_seed(s.traffic_seed ^ 0x5245u, trip.index()), static_cast<std::uint64_t>(j)));
      for (std::int32_t k = 0; k < vs.occupancy; ++k) remain += rng.bernoulli(config_.remain_probability) ? 1 : 0;
    }
    r.alighted = vs.occupancy - remain;
  } else {
    const double f = chain_->alight_fraction(trip, j);
    r.alighted = std::min(vs.occupancy, static_cast<std::int32_t>(std::llround(vs.occupancy * f)));
  }
  vs.occupancy -= r.alighted;
  s.delivered += r.alighted;
  if (j == t.last_index()) return r;

  const StopId stop = t.stops[j].stop;
  std::int32_t room = vs.capacity - vs.occupancy;
  for (PassengerGroup& g : s.waiting) {
    if (g.stop != stop || g.service != t.service || g.arrival > s.clock || g.deadline < s.clock) continue;
    const std::int32_t take = std::min(room, g.count);
    g.count -= take;
    room -= take;
    r.boarded += take;
    r.left_behind += g.count;
  }
  std::erase_if(s.waiting, [](const PassengerGroup& g) { return g.count == 0; });
  vs.occupancy += r.boarded;
  s.served += r.boarded;
  s.tally.add_served(s.clock, r.boarded);
  return r;
}

void Simulator::depart(WorldState& s, VehicleId v, TripId trip, std::int32_t from) const {
  const Trip& t = schedule().trip(trip);
  VehicleState& vs = s.vehicles[v.index()];
  const StopId a = t.stops[from].stop;
  const StopId b = t.stops[from + 1].stop;
  Rng rng(derive_seed(derive_seed(s.traffic_seed, trip.index()), static_cast<std::uint64_t>(from)));
  const Seconds arrive = std::max(s.clock + sample_travel_time(scenario_->travel, a, b, rng), t.stops[from + 1].scheduled);
  const double km = scenario_->distances(a, b);
  vs.service_km += km;
  if (vs.kind == VehicleKind::Regular) s.tally.add_regular(s.clock, km);
  vs.status = VehicleStatus::InTransit;
  if (breaks_on(s, v, trip, from + 1)) {
    s.schedule(SimEvent{breakdown_time(s, trip, arrive), EventKind::Disruption, v.value, trip, from + 1, arrive, 0});
  } else {
    s.schedule(SimEvent{arrive, EventKind::BusArrival, v.value, trip, from + 1, 0, 0});
  }
}

bool Simulator::has_next_trip(const WorldState& s, VehicleId v) const {
  const VehicleState& vs = s.vehicles[v.index()];
  if (vs.duty != Duty::Schedule && vs.duty != Duty::Takeover) return false;
  return static_cast<std::size_t>(vs.duty_cursor) + 1 < schedule().trips_of(vs.duty_source).size();
}

void Simulator::finish_trip(WorldState& s, VehicleId v, EventLog* log) const {
  VehicleState& vs = s.vehicles[v.index()];
  if (log) {
    LogRecord r = LogRecord::at(s.clock, "trip_end");
    r.vehicle = v;
    r.trip = vs.trip;
    r.stop = vs.location;
    log->push_back(r);
  }
  if (has_next_trip(s, v)) {
    ++vs.duty_cursor;
    const TripId next = schedule().trips_of(vs.duty_source)[static_cast<std::size_t>(vs.duty_cursor)];
    const Trip& nt = schedule().trip(next);
    const double km = scenario_->distances(vs.location, nt.stops.front().stop);
    vs.service_km += km;
    if (vs.kind == VehicleKind::Regular) s.tally.add_regular(s.clock, km);
    vs.trip = next;
    vs.stop_index = 0;
    s.schedule(SimEvent{std::max(s.clock + deadhead_seconds(km), nt.start()), EventKind::BusArrival, v.value, next, 0,
                        0, 0});
    return;
  }
  vs.duty = Duty::None;
  vs.status = VehicleStatus::Idle;
  vs.trip = TripId{};
  vs.stop_index = -1;
}

std::optional<DecisionEpoch> Simulator::on_bus_arrival(WorldState& s, const SimEvent& e, EventLog* log) const {
  const VehicleId v(e.entity);
  const Trip& t = schedule().trip(e.trip);
  const std::int32_t j = e.stop_index;
  if (j == 0 && breaks_on(s, v, e.trip, 0)) return break_down(s, v, e.trip, 0, log);

  VehicleState& vs = s.vehicles[v.index()];
  if (vs.status == VehicleStatus::OutOfService) throw ConsistencyError("arrival of a broken-down bus");
  vs.location = t.stops[j].stop;
  vs.trip = e.trip;
  vs.stop_index = j;
  vs.status = VehicleStatus::InTransit;
  const BoardingResult r = board_and_alight(s, v, e.trip, j);
  if (log) {
    LogRecord rec = LogRecord::at(s.clock, "bus_arrival");
    rec.vehicle = v;
    rec.trip = e.trip;
    rec.stop_index = j;
    rec.stop = vs.location;
    rec.boarded = r.boarded;
    rec.alighted = r.alighted;
    rec.count = r.left_behind;
    log->push_back(rec);
  }
  if (j == t.last_index()) {
    finish_trip(s, v, log);
    return std::nullopt;
  }
  depart(s, v, e.trip, j);
  if (r.left_behind > 0 && !s.trip_cover[e.trip.index()].valid() &&
      s.clock - vs.last_dispatch_epoch >= config_.dispatch_interval) {
    auto epoch = offer(s, OverageTrigger{v, e.trip, j, r.left_behind});
    if (epoch) s.vehicles[v.index()].last_dispatch_epoch = s.clock;
    return epoch;
  }
  return std::nullopt;
}

std::optional<DecisionEpoch> Simulator::on_disruption(WorldState& s, const SimEvent& e, EventLog* log) const {
  return break_down(s, VehicleId(e.entity), e.trip, std::max(0, e.stop_index - 1), log);
}

std::optional<DecisionEpoch> Simulator::break_down(WorldState& s, VehicleId v, TripId trip, std::int32_t last_index,
                                                   EventLog* log) const {
  VehicleState& vs = s.vehicles[v.index()];
  const Trip& t = schedule().trip(trip);
  const StopId stop = t.stops[last_index].stop;
  vs.status = VehicleStatus::OutOfService;
  vs.location = stop;
  vs.trip = trip;
  vs.stop_index = last_index;
  vs.broken_trip = trip;
  vs.broken_stop_index = last_index;
  vs.taken_over = false;
  const std::int32_t stranded = vs.occupancy;
  if (stranded > 0) {
    PassengerGroup g{s.next_group_id++, stop, t.service, stranded, s.clock, s.clock + config_.passenger_wait};
    s.waiting.push_back(g);
    s.schedule(SimEvent{g.deadline, EventKind::PassengerLeave, g.id, trip, last_index, 0, 0});
    s.served -= stranded;
    s.tally.add_served(s.clock, -stranded);
    vs.occupancy = 0;
  }
  if (log) {
    LogRecord r = LogRecord::at(s.clock, "breakdown");
    r.vehicle = v;
    r.trip = trip;
    r.stop_index = last_index;
    r.stop = stop;
    r.count = stranded;
    log->push_back(r);
  }
  return offer(s, BreakdownTrigger{v, trip, last_index});
}

std::optional<DecisionEpoch> Simulator::on_dispatch_arrival(WorldState& s, const SimEvent& e, EventLog* log) const {
  const VehicleId v(e.entity);
  VehicleState& vs = s.vehicles[v.index()];
  vs.en_route = false;
  vs.location = vs.destination;
  if (log) {
    LogRecord r = LogRecord::at(s.clock, "dispatch_arrival");
    r.vehicle = v;
    r.trip = vs.trip;
    r.stop_index = vs.stop_index;
    r.stop = vs.location;
    log->push_back(r);
  }
  if (vs.duty == Duty::None) {
    vs.status = VehicleStatus::Idle;
    return std::nullopt;
  }
  const Trip& t = schedule().trip(vs.trip);
  s.schedule(SimEvent{std::max(s.clock, t.stops[static_cast<std::size_t>(vs.stop_index)].scheduled),
                      EventKind::BusArrival, v.value, vs.trip, vs.stop_index, 0, 0});
  return std::nullopt;
}

std::optional<DecisionEpoch> Simulator::on_passenger_leave(WorldState& s, const SimEvent& e, EventLog* log) const {
  auto it = std::find_if(s.waiting.begin(), s.waiting.end(), [&](const PassengerGroup& g) { return g.id == e.entity; });
  if (it == s.waiting.end()) return std::nullopt;
  s.left += it->count;
  s.tally.add_left(s.clock, it->count);
  if (log) {
    LogRecord r = LogRecord::at(s.clock, "passenger_leave");
    r.trip = e.trip;
    r.stop_index = e.stop_index;
    r.stop = it->stop;
    r.group = it->id;
    r.count = it->count;
    log->push_back(r);
  }
  s.waiting.erase(it);
  return std::nullopt;
}

std::optional<DecisionEpoch> Simulator::on_stationing_epoch(WorldState& s, EventLog* log) const {
  if (s.clock + config_.stationing_interval <= schedule().service_end()) {
    s.schedule(SimEvent{s.clock + config_.stationing_interval, EventKind::StationingEpoch, -1, TripId{}, -1, 0, 0});
  }
  VehicleId chosen;
  VehicleId first;
  for (VehicleId v : schedule().substitutes()) {
    if (!s.vehicles[v.index()].available()) continue;
    if (!first.valid()) first = v;
    if (v.value > s.periodic_cursor) {
      chosen = v;
      break;
    }
  }
  if (!chosen.valid()) chosen = first;
  if (chosen.valid()) s.periodic_cursor = chosen.value;
  if (log) {
    LogRecord r = LogRecord::at(s.clock, "stationing_epoch");
    r.vehicle = chosen;
    log->push_back(r);
  }
  return offer(s, PeriodicTrigger{chosen});
}

// --- decisions ---------------------------------------------------------------------

std::optional<DecisionEpoch> Simulator::offer(const WorldState& s, EpochTrigger trigger) const {
  std::vector<Action> actions = enumerate_actions(s, trigger);
  if (actions.size() <= 1) return std::nullopt;
  return DecisionEpoch{s.clock, trigger, std::move(actions)};
}

VehicleId Simulator::nearest_available(const WorldState& s, StopId target) const {
  VehicleId best;
  double best_km = 0.0;
  for (VehicleId v : schedule().substitutes()) {
    const VehicleState& vs = s.vehicles[v.index()];
    if (!vs.available()) continue;
    const double km = scenario_->distances(vs.location, target);
    if (!best.valid() || km < best_km) {
      best = v;
      best_km = km;
    }
  }
  return best;
}

std::vector<Action> Simulator::enumerate_actions(const WorldState& s, const EpochTrigger& trigger) const {
  const TransitSchedule& sch = schedule();
  std::vector<Action> out{NoAction{}};
  if (const auto* o = std::get_if<OverageTrigger>(&trigger)) {
    if (s.trip_cover[o->trip.index()].valid()) return out;
    const VehicleId sub = nearest_available(s, sch.trip(o->trip).stops[static_cast<std::size_t>(o->stop_index)].stop);
    if (!sub.valid()) return out;
    for (std::int32_t k = 0; k <= o->stop_index; ++k) out.emplace_back(Dispatch{sub, o->trip, k});
  } else if (const auto* b = std::get_if<BreakdownTrigger>(&trigger)) {
    const VehicleState& bus = s.vehicles[b->vehicle.index()];
    if (bus.status != VehicleStatus::OutOfService || bus.taken_over) return out;
    const VehicleId sub = nearest_available(s, sch.trip(b->trip).stops[static_cast<std::size_t>(b->stop_index)].stop);
    if (!sub.valid()) return out;
    out.emplace_back(Dispatch{sub, b->trip, b->stop_index});
  } else {
    const VehicleId sub = std::get<PeriodicTrigger>(trigger).substitute;
    if (!sub.valid() || !s.vehicles[sub.index()].available()) return out;
    for (StopId site : sch.stationing_sites) out.emplace_back(Station{sub, site});
    for (std::size_t i = 0; i < s.vehicles.size(); ++i) {
      const VehicleState& bus = s.vehicles[i];
      if (bus.status == VehicleStatus::OutOfService && !bus.taken_over) {
        out.emplace_back(Dispatch{sub, bus.broken_trip, bus.broken_stop_index});
      }
    }
  }
  return out;
}

std::optional<std::string> Simulator::check_action(const WorldState& s, const Action& action) const {
  const TransitSchedule& sch = schedule();
  auto check_vehicle = [&](VehicleId v) -> std::optional<std::string> {
    if (!v.valid() || v.index() >= s.vehicles.size()) return "unknown vehicle";
    const VehicleState& vs = s.vehicles[v.index()];
    if (vs.kind != VehicleKind::Substitute) return "vehicle " + sch.vehicle(v).id + " is not a substitute";
    if (!vs.available()) return "substitute " + sch.vehicle(v).id + " is not idle";
    return std::nullopt;
  };
  if (const auto* d = std::get_if<Dispatch>(&action)) {
    if (auto why = check_vehicle(d->vehicle)) return why;
    if (!d->trip.valid() || d->trip.index() >= sch.trips.size()) return "unknown trip";
    const Trip& t = sch.trip(d->trip);
    if (d->stop_index < 0 || d->stop_index > t.last_index()) return "stop index outside trip " + t.id;
    const VehicleState& owner = s.vehicles[t.vehicle.index()];
    if (owner.status == VehicleStatus::OutOfService) {
      if (owner.taken_over) return "breakdown on trip " + t.id + " already taken over";
      if (owner.broken_trip != d->trip) return "trip " + t.id + " belongs to a broken-down bus";
      if (owner.broken_stop_index != d->stop_index) return "takeover must start where the bus broke down";
      return std::nullopt;
    }
    if (s.trip_cover[d->trip.index()].valid()) return "trip " + t.id + " is already covered";
    if (owner.trip != d->trip || owner.status != VehicleStatus::InTransit || s.clock < t.start()) {
      return "trip " + t.id + " is not in progress";
    }
    if (d->stop_index > owner.stop_index) return "trip " + t.id + " has not reached that stop";
    return std::nullopt;
  }
  if (const auto* st = std::get_if<Station>(&action)) {
    if (auto why = check_vehicle(st->vehicle)) return why;
    if (!sch.can_stage_at(st->site)) return "stop is not a stationing site";
  }
  return std::nullopt;
}

void Simulator::apply_action(WorldState& s, const Action& action, EventLog* log) const {
  if (auto why = check_action(s, action)) throw InfeasibleAction(*why);
  if (std::holds_alternative<NoAction>(action)) return;
  const TransitSchedule& sch = schedule();

  VehicleId v;
  StopId target;
  const char* kind = "station";
  if (const auto* d = std::get_if<Dispatch>(&action)) {
    kind = "dispatch";
    v = d->vehicle;
    const Trip& t = sch.trip(d->trip);
    target = t.stops[static_cast<std::size_t>(d->stop_index)].stop;
    VehicleState& vs = s.vehicles[v.index()];
    vs.trip = d->trip;
    vs.stop_index = d->stop_index;
    VehicleState& owner = s.vehicles[t.vehicle.index()];
    if (owner.status == VehicleStatus::OutOfService) {
      owner.taken_over = true;
      vs.duty = Duty::Takeover;
      vs.duty_source = t.vehicle;
      vs.duty_cursor = owner.duty_cursor;
      const auto& rest = sch.trips_of(t.vehicle);
      for (std::size_t c = static_cast<std::size_t>(owner.duty_cursor); c < rest.size(); ++c) s.trip_cover[rest[c].index()] = v;
    } else {
      vs.duty = Duty::Coverage;
      s.trip_cover[d->trip.index()] = v;
    }
  } else {
    const auto& st = std::get<Station>(action);
    v = st.vehicle;
    target = st.site;
    VehicleState& vs = s.vehicles[v.index()];
    vs.duty = Duty::None;
    vs.trip = TripId{};
    vs.stop_index = -1;
  }
  VehicleState& vs = s.vehicles[v.index()];
  const double km = scenario_->distances(vs.location, target);
  vs.deadhead_km += km;
  s.tally.add_deadhead(s.clock, km);
  vs.status = VehicleStatus::InTransit;
  vs.en_route = true;
  vs.destination = target;
  s.schedule(SimEvent{s.clock + deadhead_seconds(km), EventKind::DispatchArrival, v.value, vs.trip, vs.stop_index, 0, 0});
  if (log) {
    LogRecord r = LogRecord::at(s.clock, kind);
    r.vehicle = v;
    r.trip = vs.trip;
    r.stop_index = vs.stop_index;
    r.stop = target;
    r.km = km;
    log->push_back(r);
  }
}

// --- audit -------------------------------------------------------------------------

std::vector<std::string> audit_state(const WorldState& s, const TransitSchedule& sch) {
  std::vector<std::string> out;
  const std::int64_t waiting = s.waiting_count();
  const std::int64_t onboard = s.onboard();
  if (s.generated != s.served + s.left + waiting) {
    out.push_back("generated " + std::to_string(s.generated) + " != served " + std::to_string(s.served) + " + left " +
                  std::to_string(s.left) + " + waiting " + std::to_string(waiting));
  }
  if (s.delivered + onboard != s.served) {
    out.push_back("delivered + onboard " + std::to_string(s.delivered + onboard) + " != served " +
                  std::to_string(s.served));
  }
  for (std::size_t i = 0; i < s.vehicles.size(); ++i) {
    const VehicleState& v = s.vehicles[i];
    const std::string& id = sch.vehicles[i].id;
    if (v.occupancy < 0 || v.occupancy > v.capacity) out.push_back(id + ": occupancy outside [0, capacity]");
    if (v.kind == VehicleKind::Regular && v.deadhead_km != 0.0) out.push_back(id + ": regular bus accrued deadhead");
    if (v.status == VehicleStatus::OutOfService && v.occupancy != 0) out.push_back(id + ": broken bus carries passengers");
  }
  for (const PassengerGroup& g : s.waiting) {
    if (g.count <= 0) out.push_back("empty passenger group " + std::to_string(g.id));
  }
  for (const SimEvent& e : s.pending.events()) {
    if (e.time < s.clock) {
      out.push_back(std::string("pending ") + to_string(e.kind) + " before the clock");
      break;
    }
  }
  return out;
}

}  // namespace stationing
