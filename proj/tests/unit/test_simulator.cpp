#include <gtest/gtest.h>

#include <algorithm>

#include "../support/toy.hpp"
#include "stationing/baselines.hpp"
#include "stationing/policy.hpp"
#include "stationing/scenario.hpp"
#include "stationing/simulator.hpp"

using namespace stationing;

namespace {

// G --1km-- S1 --1km-- S2 --1km-- S3 --1km-- T, plus a far site F 12 km
// north of the garage. One bus runs T1 outbound then T2 back.
struct Line {
  Scenario sc;
  StopId g, s1, s2, s3, t, f;
  VehicleId bus, sub;
  TripId t1, t2;
};

Line make_line(std::int32_t capacity = 40, std::int32_t substitutes = 1) {
  toy::Builder b;
  Line l;
  l.g = b.stop("G", 0, 0, true);
  l.s1 = b.stop("S1", 1);
  l.s2 = b.stop("S2", 2);
  l.s3 = b.stop("S3", 3);
  l.t = b.stop("T", 4, 0, true);
  l.f = b.stop("F", 0, 12);
  b.garage(l.g);
  b.site(l.s2);
  b.site(l.f);
  l.bus = b.bus("BUS-1", capacity);
  l.sub = b.substitute("SUB-1");
  for (std::int32_t k = 1; k < substitutes; ++k) b.substitute("SUB-" + std::to_string(k + 1));
  l.t1 = b.trip("T1", "R1", 0, l.bus, {{l.g, 1000}, {l.s1, 1200}, {l.s2, 1400}, {l.s3, 1600}, {l.t, 1800}});
  l.t2 = b.trip("T2", "R1", 1, l.bus, {{l.t, 2400}, {l.s3, 2600}, {l.s2, 2800}, {l.s1, 3000}, {l.g, 3200}});
  l.sc = b.build();
  return l;
}

// Steps to the next epoch of the given trigger type, passing every other
// epoch with NoAction.
template <class Trigger>
std::optional<DecisionEpoch> next_epoch(const Simulator& sim, WorldState& s, EventLog* log = nullptr) {
  while (!sim.done(s)) {
    auto e = sim.step(s, log);
    if (e && std::holds_alternative<Trigger>(e->trigger)) return e;
  }
  return std::nullopt;
}

std::vector<LogRecord> of_kind(const EventLog& log, const std::string& kind) {
  std::vector<LogRecord> out;
  for (const auto& r : log) {
    if (kind == r.kind) out.push_back(r);
  }
  return out;
}

void finish(const Simulator& sim, WorldState& s, EventLog* log = nullptr) {
  while (!sim.done(s)) sim.step(s, log);
}

}  // namespace

TEST(Boarding, UncontendedBoarding) {
  const Line l = make_line();
  EventChain c = toy::empty_chain(l.sc);
  toy::add_group(c, l.sc, l.t1, 1, 3, 1100);
  const Simulator sim(l.sc, c);
  WorldState s = sim.initial_state(1);
  EventLog log;
  while (!sim.done(s)) {
    sim.step(s, &log);
    ASSERT_TRUE(audit_state(s, l.sc.schedule).empty());
    if (s.clock == 1200) break;
  }
  EXPECT_EQ(s.vehicles[l.bus.index()].occupancy, 3);
  EXPECT_EQ(s.waiting_count(), 0);
  EXPECT_EQ(s.served, 3);
  finish(sim, s);
  EXPECT_EQ(s.delivered, 3);
  EXPECT_EQ(s.left, 0);
}

TEST(Boarding, OverloadRaisesOverageAndLeaveAtDeadline) {
  const Line l = make_line(5);
  EventChain c = toy::empty_chain(l.sc);
  toy::add_group(c, l.sc, l.t1, 1, 8, 1100);
  const Simulator sim(l.sc, c);
  WorldState s = sim.initial_state(1);
  EventLog log;
  const auto e = next_epoch<OverageTrigger>(sim, s, &log);
  ASSERT_TRUE(e);
  const auto& o = std::get<OverageTrigger>(e->trigger);
  EXPECT_EQ(o.vehicle, l.bus);
  EXPECT_EQ(o.trip, l.t1);
  EXPECT_EQ(o.stop_index, 1);
  EXPECT_EQ(o.left_behind, 3);
  EXPECT_EQ(e->time, 1200);
  EXPECT_EQ(s.served, 5);
  EXPECT_EQ(s.waiting_count(), 3);
  finish(sim, s, &log);
  const auto leaves = of_kind(log, "passenger_leave");
  ASSERT_EQ(leaves.size(), 1u);
  EXPECT_EQ(leaves[0].time, 1100 + 1800);
  EXPECT_EQ(leaves[0].count, 3);
  EXPECT_EQ(s.left, 3);
}

TEST(Boarding, EmptyStopAndOtherService) {
  const Line l = make_line();
  EventChain c = toy::empty_chain(l.sc);
  // Waiting at S1 for the return direction.
  toy::add_group(c, l.sc, l.t2, 3, 4, 1100);
  const Simulator sim(l.sc, c);
  WorldState s = sim.initial_state(1);
  while (s.clock < 1100) sim.step(s);
  s.vehicles[l.bus.index()].location = l.s1;
  const BoardingResult r = sim.board_and_alight(s, l.bus, l.t1, 1);
  EXPECT_EQ(r.boarded, 0);
  EXPECT_EQ(r.left_behind, 0);
  ASSERT_EQ(s.waiting.size(), 1u);
  EXPECT_EQ(s.waiting[0].count, 4);
  const BoardingResult none = sim.board_and_alight(s, l.bus, l.t1, 2);
  EXPECT_EQ(none.boarded + none.alighted + none.left_behind, 0);
}

TEST(Boarding, FifoSplitMatchesOracle) {
  // Every arrival order of two groups of 4 against 6 free seats: the earlier
  // group boards whole, the later one splits 2/2.
  for (int first_is_a = 0; first_is_a < 2; ++first_is_a) {
    const Line l = make_line(6);
    EventChain c = toy::empty_chain(l.sc);
    toy::add_group(c, l.sc, l.t1, 1, 4, first_is_a ? 1100 : 1150);
    toy::add_group(c, l.sc, l.t1, 1, 4, first_is_a ? 1150 : 1100);
    const Simulator sim(l.sc, c);
    WorldState s = sim.initial_state(1);
    while (s.clock < 1150) sim.step(s);
    ASSERT_EQ(s.waiting.size(), 2u);
    const std::int32_t later = s.waiting[1].id;
    const BoardingResult r = sim.board_and_alight(s, l.bus, l.t1, 1);
    EXPECT_EQ(r.boarded, 6);
    EXPECT_EQ(r.left_behind, 2);
    ASSERT_EQ(s.waiting.size(), 1u);
    EXPECT_EQ(s.waiting[0].id, later);
    EXPECT_EQ(s.waiting[0].count, 2);
  }
}

TEST(Boarding, GroupBoardsAtItsDeadlineButNotAfter) {
  const Line l = make_line();
  EventChain c = toy::empty_chain(l.sc);
  // S1 on T2 is due at 3000.
  toy::add_group(c, l.sc, l.t2, 3, 2, 1200);
  toy::add_group(c, l.sc, l.t2, 3, 3, 1199);
  const Simulator sim(l.sc, c);
  WorldState s = sim.initial_state(1);
  finish(sim, s);
  EXPECT_EQ(s.served, 2);
  EXPECT_EQ(s.left, 3);
}

TEST(Breakdown, StrandedPassengersReturnToLastStop) {
  const Line l = make_line();
  EventChain c = toy::empty_chain(l.sc);
  toy::add_group(c, l.sc, l.t1, 1, 6, 1100);
  toy::add_disruption(c, l.sc, l.t1, 3, 1600);
  const Simulator sim(l.sc, c);
  WorldState s = sim.initial_state(1);
  const auto e = next_epoch<BreakdownTrigger>(sim, s);
  ASSERT_TRUE(e);
  EXPECT_EQ(e->time, 1599);
  const auto& b = std::get<BreakdownTrigger>(e->trigger);
  EXPECT_EQ(b.stop_index, 2);
  const VehicleState& bus = s.vehicles[l.bus.index()];
  EXPECT_EQ(bus.status, VehicleStatus::OutOfService);
  EXPECT_EQ(bus.location, l.s2);
  EXPECT_EQ(bus.occupancy, 0);
  ASSERT_EQ(s.waiting.size(), 1u);
  EXPECT_EQ(s.waiting[0].stop, l.s2);
  EXPECT_EQ(s.waiting[0].count, 6);
  EXPECT_EQ(s.waiting[0].deadline, 1599 + 1800);
  EXPECT_EQ(s.served, 0);
  EXPECT_TRUE(audit_state(s, l.sc.schedule).empty());
  ASSERT_EQ(e->feasible_actions.size(), 2u);
  EXPECT_EQ(e->feasible_actions[1], Action(Dispatch{l.sub, l.t1, 2}));

  finish(sim, s);
  EXPECT_EQ(s.left, 6);
  EXPECT_EQ(s.vehicles[l.bus.index()].status, VehicleStatus::OutOfService);
}

TEST(Breakdown, TakeoverLocksSubstituteThroughRemainingTrips) {
  const Line l = make_line();
  EventChain c = toy::empty_chain(l.sc);
  toy::add_group(c, l.sc, l.t1, 1, 6, 1100);
  toy::add_group(c, l.sc, l.t2, 1, 2, 2550);
  toy::add_disruption(c, l.sc, l.t1, 3, 1600);
  const Simulator sim(l.sc, c);
  WorldState s = sim.initial_state(1);
  EventLog log;
  const auto e = next_epoch<BreakdownTrigger>(sim, s, &log);
  ASSERT_TRUE(e);
  sim.apply_action(s, Dispatch{l.sub, l.t1, 2}, &log);
  EXPECT_EQ(s.trip_cover[l.t1.index()], l.sub);
  EXPECT_EQ(s.trip_cover[l.t2.index()], l.sub);
  EXPECT_EQ(sim.check_action(s, Dispatch{l.sub, l.t1, 2}).has_value(), true);

  while (!sim.done(s)) {
    auto epoch = sim.step(s, &log);
    if (s.clock < 3200) {
      EXPECT_TRUE(sim.check_action(s, Station{l.sub, l.s2}).has_value()) << "at " << s.clock;
      EXPECT_EQ(sim.enumerate_actions(s, PeriodicTrigger{l.sub}).size(), 1u);
    }
    if (epoch) {
      for (const Action& a : epoch->feasible_actions) {
        if (const auto* d = std::get_if<Dispatch>(&a)) EXPECT_NE(d->vehicle, l.sub);
        if (const auto* st = std::get_if<Station>(&a)) EXPECT_NE(st->vehicle, l.sub);
      }
    }
    ASSERT_TRUE(audit_state(s, l.sc.schedule).empty());
  }
  const VehicleState& sub = s.vehicles[l.sub.index()];
  EXPECT_DOUBLE_EQ(sub.deadhead_km, 2.0);
  EXPECT_EQ(sub.status, VehicleStatus::Idle);
  EXPECT_EQ(sub.location, l.g);
  EXPECT_EQ(s.served, 8);
  EXPECT_EQ(s.delivered, 8);
  EXPECT_EQ(s.left, 0);
  // 2 km at 30 km/h: reaches S2 at 1599 + 240.
  const auto arrivals = of_kind(log, "dispatch_arrival");
  ASSERT_EQ(arrivals.size(), 1u);
  EXPECT_EQ(arrivals[0].time, 1839);
  for (const auto& r : of_kind(log, "bus_arrival")) {
    if (r.trip == l.t2) EXPECT_EQ(r.vehicle, l.sub);
  }
}

TEST(Actions, StationToFarSite) {
  const Line l = make_line();
  const EventChain c = toy::empty_chain(l.sc);
  const Simulator sim(l.sc, c);
  WorldState s = sim.initial_state(1);
  sim.apply_action(s, Station{l.sub, l.f});
  const VehicleState& v = s.vehicles[l.sub.index()];
  EXPECT_DOUBLE_EQ(v.deadhead_km, 12.0);
  EXPECT_TRUE(v.en_route);
  EXPECT_FALSE(v.available());
  EXPECT_EQ(sim.deadhead_seconds(12.0), 1440);
  finish(sim, s);
  EXPECT_EQ(s.vehicles[l.sub.index()].status, VehicleStatus::Idle);
  EXPECT_EQ(s.vehicles[l.sub.index()].location, l.f);
  EXPECT_DOUBLE_EQ(s.vehicles[l.sub.index()].deadhead_km, 12.0);
}

TEST(Actions, NoActionLeavesStateAlone) {
  const Line l = make_line();
  const EventChain c = toy::empty_chain(l.sc);
  const Simulator sim(l.sc, c);
  WorldState s = sim.initial_state(1);
  const auto before = s.pending.size();
  sim.apply_action(s, NoAction{});
  EXPECT_EQ(s.pending.size(), before);
  EXPECT_EQ(s.vehicles[l.sub.index()].deadhead_km, 0.0);
}

TEST(Actions, InfeasibleActionsAreRejected) {
  const Line l = make_line();
  const EventChain c = toy::empty_chain(l.sc);
  const Simulator sim(l.sc, c);
  WorldState s = sim.initial_state(1);
  EXPECT_THROW(sim.apply_action(s, Station{l.sub, l.s1}), InfeasibleAction);
  EXPECT_THROW(sim.apply_action(s, Station{l.bus, l.s2}), InfeasibleAction);
  EXPECT_THROW(sim.apply_action(s, Dispatch{l.sub, l.t1, 9}), InfeasibleAction);
  // T1 has not started yet.
  EXPECT_THROW(sim.apply_action(s, Dispatch{l.sub, l.t1, 0}), InfeasibleAction);
  sim.apply_action(s, Station{l.sub, l.s2});
  const auto why = sim.check_action(s, Station{l.sub, l.f});
  ASSERT_TRUE(why);
  EXPECT_NE(why->find("not idle"), std::string::npos);
}

TEST(Actions, OverageCoverageServesOneTripThenIdles) {
  const Line l = make_line(5);
  EventChain c = toy::empty_chain(l.sc);
  toy::add_group(c, l.sc, l.t1, 1, 8, 1100);
  toy::add_group(c, l.sc, l.t2, 1, 1, 2500);
  const Simulator sim(l.sc, c);
  WorldState s = sim.initial_state(1);
  const auto e = next_epoch<OverageTrigger>(sim, s);
  ASSERT_TRUE(e);
  ASSERT_EQ(e->feasible_actions.size(), 3u);
  sim.apply_action(s, Dispatch{l.sub, l.t1, 1});
  EXPECT_EQ(s.trip_cover[l.t1.index()], l.sub);
  EXPECT_FALSE(s.trip_cover[l.t2.index()].valid());
  finish(sim, s);
  EXPECT_EQ(s.served, 9);
  EXPECT_EQ(s.left, 0);
  const VehicleState& sub = s.vehicles[l.sub.index()];
  EXPECT_EQ(sub.status, VehicleStatus::Idle);
  EXPECT_EQ(sub.location, l.t);
  EXPECT_DOUBLE_EQ(sub.deadhead_km, 1.0);
}

TEST(Actions, OverageEpochsAreSpacedPerBus) {
  const Line l = make_line(2);
  EventChain c = toy::empty_chain(l.sc);
  toy::add_group(c, l.sc, l.t1, 1, 5, 1100);
  toy::add_group(c, l.sc, l.t1, 2, 5, 1300);
  toy::add_group(c, l.sc, l.t2, 1, 5, 2500);
  const Simulator sim(l.sc, c);
  WorldState s = sim.initial_state(1);
  std::vector<Seconds> overages;
  while (!sim.done(s)) {
    auto e = sim.step(s);
    if (e && std::holds_alternative<OverageTrigger>(e->trigger)) overages.push_back(e->time);
  }
  // 1400 is within 15 minutes of 1200; 2600 is not.
  EXPECT_EQ(overages, (std::vector<Seconds>{1200, 2600}));
}

TEST(Enumerate, OverageOffersEveryVisitedStop) {
  toy::Builder b;
  std::vector<std::pair<StopId, Seconds>> stops;
  for (int j = 0; j < 10; ++j) stops.emplace_back(b.stop("S" + std::to_string(j), j, 0, j == 0 || j == 9), 1000 + 100 * j);
  b.garage(stops.front().first);
  const auto bus = b.bus("BUS-1");
  const auto sub = b.substitute("SUB-1");
  const auto trip = b.trip("T1", "R1", 0, bus, stops);
  const Scenario sc = b.build();
  const EventChain c = toy::empty_chain(sc);
  const Simulator sim(sc, c);
  WorldState s = sim.initial_state(1);
  const auto acts = sim.enumerate_actions(s, OverageTrigger{bus, trip, 4, 3});
  ASSERT_EQ(acts.size(), 6u);
  EXPECT_EQ(acts[0], Action(NoAction{}));
  for (std::int32_t k = 0; k <= 4; ++k) EXPECT_EQ(acts[static_cast<std::size_t>(k) + 1], Action(Dispatch{sub, trip, k}));

  s.vehicles[sub.index()].status = VehicleStatus::InTransit;
  EXPECT_EQ(sim.enumerate_actions(s, OverageTrigger{bus, trip, 4, 3}).size(), 1u);
  EXPECT_EQ(sim.enumerate_actions(s, BreakdownTrigger{bus, trip, 4}).size(), 1u);
}

TEST(Enumerate, PeriodicOffersOneSubstituteAtEverySite) {
  GeneratorSpec spec;
  spec.substitutes = 2;
  const Scenario sc = synthesize_scenario(spec, 2);
  ASSERT_EQ(sc.schedule.stationing_sites.size(), 25u);
  const EventChain c = sample_event_chain(sc, 1);
  const Simulator sim(sc, c);
  WorldState s = sim.initial_state(1);
  const auto e = next_epoch<PeriodicTrigger>(sim, s);
  ASSERT_TRUE(e);
  ASSERT_EQ(e->feasible_actions.size(), 26u);
  const VehicleId chosen = std::get<PeriodicTrigger>(e->trigger).substitute;
  for (std::size_t i = 1; i < e->feasible_actions.size(); ++i) {
    EXPECT_EQ(std::get<Station>(e->feasible_actions[i]).vehicle, chosen);
  }
  // The next periodic epoch reviews the other substitute.
  const auto e2 = next_epoch<PeriodicTrigger>(sim, s);
  ASSERT_TRUE(e2);
  EXPECT_NE(std::get<PeriodicTrigger>(e2->trigger).substitute, chosen);
}

TEST(Enumerate, NoSubstitutesMeansNoEpochs) {
  toy::Builder b;
  const auto g = b.stop("G", 0, 0, true);
  const auto t = b.stop("T", 1, 0, true);
  b.garage(g);
  const auto bus = b.bus("BUS-1", 1);
  const auto trip = b.trip("T1", "R1", 0, bus, {{g, 100}, {t, 200}});
  const Scenario sc = b.build();
  EventChain c = toy::empty_chain(sc);
  toy::add_group(c, sc, trip, 0, 5, 50);
  IdlePolicy idle;
  const RunResult r = run_day(sc, c, SimConfig{}, idle);
  EXPECT_EQ(r.metrics.epochs, 0);
  EXPECT_EQ(r.metrics.served, 1);
  EXPECT_EQ(r.metrics.left, 4);
}

TEST(RunDay, EmptyDay) {
  const Line l = make_line();
  const EventChain c = toy::empty_chain(l.sc);
  IdlePolicy idle;
  const RunResult r = run_day(l.sc, c, SimConfig{}, idle, RunOptions{.audit = true});
  EXPECT_EQ(r.metrics.served, 0);
  EXPECT_EQ(r.metrics.left, 0);
  EXPECT_EQ(r.metrics.total_deadhead_km, 0.0);
  EXPECT_DOUBLE_EQ(r.metrics.regular_km, 4.0 + 4.0);
  EXPECT_TRUE(r.violations.empty());
}

TEST(RunDay, FivePassengers) {
  const Line l = make_line();
  EventChain c = toy::empty_chain(l.sc);
  toy::add_group(c, l.sc, l.t1, 0, 5, 900);
  IdlePolicy idle;
  const RunResult r = run_day(l.sc, c, SimConfig{}, idle, RunOptions{.audit = true});
  EXPECT_EQ(r.metrics.generated, 5);
  EXPECT_EQ(r.metrics.served, 5);
  EXPECT_EQ(r.metrics.delivered, 5);
  EXPECT_TRUE(r.violations.empty());
}

TEST(RunDay, GreedyReducesLeftBehindOnForcedOverage) {
  const Line l = make_line(5);
  EventChain c = toy::empty_chain(l.sc);
  toy::add_group(c, l.sc, l.t1, 1, 12, 1100);
  IdlePolicy idle;
  GreedyPolicy greedy;
  const RunResult a = run_day(l.sc, c, SimConfig{}, idle, RunOptions{.audit = true});
  const RunResult b = run_day(l.sc, c, SimConfig{}, greedy, RunOptions{.audit = true});
  EXPECT_EQ(a.metrics.left, 7);
  EXPECT_LT(b.metrics.left, a.metrics.left);
  EXPECT_EQ(b.metrics.dispatches, 1);
  EXPECT_TRUE(a.violations.empty());
  EXPECT_TRUE(b.violations.empty());
}

TEST(RunDay, EarlyBusesWaitLateBusesLeaveImmediately) {
  Line l = make_line();
  const EventChain c = toy::empty_chain(l.sc);
  auto arrival_times = [&](Seconds segment) {
    l.sc.travel = TravelTimeModel{};
    for (const Trip& t : l.sc.schedule.trips) {
      for (std::size_t j = 1; j < t.stops.size(); ++j) l.sc.travel.add_samples(t.stops[j - 1].stop, t.stops[j].stop, {segment});
    }
    IdlePolicy idle;
    const RunResult r = run_day(l.sc, c, SimConfig{}, idle, RunOptions{.keep_log = true});
    std::vector<Seconds> out;
    for (const auto& rec : of_kind(r.log, "bus_arrival")) {
      if (rec.trip == l.t1) out.push_back(rec.time);
    }
    return out;
  };
  EXPECT_EQ(arrival_times(50), (std::vector<Seconds>{1000, 1200, 1400, 1600, 1800}));
  EXPECT_EQ(arrival_times(500), (std::vector<Seconds>{1000, 1500, 2000, 2500, 3000}));
}

TEST(RunDay, DeterministicLogs) {
  const Scenario sc = synthesize_scenario(GeneratorSpec{}, 6);
  const EventChain c = sample_event_chain(sc, 12);
  auto once = [&] {
    RandomPolicy p(3);
    return run_day(sc, c, SimConfig{}, p, RunOptions{.traffic_seed = 77, .keep_log = true});
  };
  const RunResult a = once();
  const RunResult b = once();
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    ASSERT_EQ(a.log[i].time, b.log[i].time);
    ASSERT_STREQ(a.log[i].kind, b.log[i].kind);
    ASSERT_EQ(a.log[i].vehicle, b.log[i].vehicle);
    ASSERT_EQ(a.log[i].count, b.log[i].count);
    ASSERT_EQ(a.log[i].boarded, b.log[i].boarded);
  }
  for (std::size_t i = 1; i < a.log.size(); ++i) ASSERT_LE(a.log[i - 1].time, a.log[i].time);
  EXPECT_EQ(a.metrics.served, b.metrics.served);
  EXPECT_EQ(a.metrics.total_deadhead_km, b.metrics.total_deadhead_km);
}

TEST(RunDay, PlacementStartsSubstitutesAtSites) {
  const Line l = make_line();
  const EventChain c = toy::empty_chain(l.sc);
  const Simulator sim(l.sc, c);
  const WorldState s = sim.initial_state(1, Placement{{l.sub, l.s2}});
  EXPECT_EQ(s.vehicles[l.sub.index()].location, l.s2);
  EXPECT_EQ(s.vehicles[l.sub.index()].deadhead_km, 0.0);
  EXPECT_THROW((void)sim.initial_state(1, Placement{{l.sub, l.s1}}), ConfigError);
  EXPECT_THROW((void)sim.initial_state(1, Placement{{l.bus, l.s2}}), ConfigError);
}

TEST(Rebind, FutureArrivalsFollowTheNewChain) {
  const Scenario sc = synthesize_scenario(GeneratorSpec{}, 9);
  const EventChain a = sample_event_chain(sc, 1);
  const EventChain b = sample_event_chain(sc, 2);
  const Simulator sim_a(sc, a);
  const Simulator sim_b(sc, b);
  WorldState s = sim_a.initial_state(5);
  while (s.clock < 12 * 3600) sim_a.step(s);
  const Seconds cut = s.clock;
  const std::int64_t generated = s.generated;
  sim_b.rebind(s);
  std::int64_t expected = generated;
  for (const auto& arr : b.arrivals) {
    if (arr.time > cut) expected += arr.count;
  }
  while (!sim_b.done(s)) {
    sim_b.step(s);
    ASSERT_TRUE(audit_state(s, sc.schedule).empty());
  }
  EXPECT_EQ(s.generated, expected);
}

TEST(Rebind, PendingBreakdownsFollowTheNewChain) {
  const Line l = make_line();
  EventChain broken = toy::empty_chain(l.sc);
  toy::add_disruption(broken, l.sc, l.t1, 3, 1600);
  const EventChain clean = toy::empty_chain(l.sc);
  const Simulator sim_broken(l.sc, broken);
  const Simulator sim_clean(l.sc, clean);

  WorldState s = sim_clean.initial_state(1);
  while (s.clock < 1400) sim_clean.step(s);
  WorldState t = s;
  sim_broken.rebind(t);
  EXPECT_TRUE(next_epoch<BreakdownTrigger>(sim_broken, t));

  WorldState u = sim_broken.initial_state(1);
  while (u.clock < 1400) sim_broken.step(u);
  sim_clean.rebind(u);
  finish(sim_clean, u);
  EXPECT_EQ(u.vehicles[l.bus.index()].status, VehicleStatus::Idle);
}

TEST(Audit, FlagsBrokenConservation) {
  const Line l = make_line();
  EventChain c = toy::empty_chain(l.sc);
  toy::add_group(c, l.sc, l.t1, 1, 3, 1100);
  const Simulator sim(l.sc, c);
  WorldState s = sim.initial_state(1);
  while (s.clock < 1200) sim.step(s);
  EXPECT_TRUE(audit_state(s, l.sc.schedule).empty());
  WorldState bad = s;
  bad.generated += 1;
  EXPECT_FALSE(audit_state(bad, l.sc.schedule).empty());
  bad = s;
  bad.vehicles[l.bus.index()].occupancy = 41;
  EXPECT_FALSE(audit_state(bad, l.sc.schedule).empty());
}

TEST(Audit, RandomPoliciesStayConsistent) {
  GeneratorSpec spec;
  spec.demand_level = 1.1;
  spec.disruptions_per_day = 6;
  const Scenario sc = synthesize_scenario(spec, 4);
  for (std::uint64_t k = 0; k < 10; ++k) {
    const EventChain c = sample_event_chain(sc, k);
    RandomPolicy p(k);
    const RunResult r = run_day(sc, c, SimConfig{}, p, RunOptions{.traffic_seed = k, .audit = true});
    EXPECT_TRUE(r.violations.empty()) << r.violations.front();
    EXPECT_EQ(r.metrics.generated, r.metrics.served + r.metrics.left);
  }
}

TEST(Config, ValidationRejectsNonsense) {
  SimConfig c;
  c.dispatch_interval = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.remain_probability = 1.5;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.deadhead_speed_kmh = 0;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Config, RemainProbabilityKeepsRidersForTheNextTrip) {
  const Line l = make_line();
  EventChain c = toy::empty_chain(l.sc);
  toy::add_group(c, l.sc, l.t1, 1, 10, 1100);
  SimConfig cfg;
  cfg.remain_probability = 1.0;
  IdlePolicy idle;
  const RunResult r = run_day(l.sc, c, cfg, idle, RunOptions{.keep_log = true, .audit = true});
  EXPECT_TRUE(r.violations.empty());
  std::int32_t alighted_at_t = 0;
  for (const auto& rec : of_kind(r.log, "bus_arrival")) {
    if (rec.trip == l.t1 && rec.stop == l.t) alighted_at_t = rec.alighted;
  }
  EXPECT_EQ(alighted_at_t, 0);
  EXPECT_EQ(r.metrics.delivered, 10);
}
