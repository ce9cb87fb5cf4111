#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stationing/scenario.hpp"
#include "stationing/world_state.hpp"

namespace stationing {

struct SimConfig {
  // Minimum spacing between overage decisions raised by one bus.
  Seconds dispatch_interval = 900;
  // Period of stationing decisions over the service window.
  Seconds stationing_interval = 900;
  // How long a passenger group waits before giving up.
  Seconds passenger_wait = 1800;
  double deadhead_speed_kmh = 30.0;
  // Chance that a passenger stays aboard at a terminal when the bus has
  // another trip.
  double remain_probability = 0.0;
};

void validate(const SimConfig& config);

// A bus left passengers behind at a stop.
struct OverageTrigger {
  VehicleId vehicle;
  TripId trip;
  std::int32_t stop_index = 0;
  std::int32_t left_behind = 0;
};

// A bus broke down; stop_index is the last stop it reached.
struct BreakdownTrigger {
  VehicleId vehicle;
  TripId trip;
  std::int32_t stop_index = 0;
};

// Periodic stationing review of one substitute.
struct PeriodicTrigger {
  VehicleId substitute;
};

using EpochTrigger = std::variant<OverageTrigger, BreakdownTrigger, PeriodicTrigger>;

const char* trigger_name(const EpochTrigger& trigger);

struct DecisionEpoch {
  Seconds time = 0;
  EpochTrigger trigger;
  // Always contains NoAction.
  std::vector<Action> feasible_actions;
};

struct BoardingResult {
  std::int32_t alighted = 0;
  std::int32_t boarded = 0;
  std::int32_t left_behind = 0;
};

struct LogRecord {
  Seconds time = 0;
  const char* kind = "";
  VehicleId vehicle;
  TripId trip;
  std::int32_t stop_index = -1;
  StopId stop;
  std::int32_t group = -1;
  std::int32_t boarded = 0;
  std::int32_t alighted = 0;
  std::int32_t count = 0;
  double km = 0.0;

  static LogRecord at(Seconds t, const char* kind) {
    LogRecord r;
    r.time = t;
    r.kind = kind;
    return r;
  }
};

using EventLog = std::vector<LogRecord>;

// Placement of substitutes at the start of the day. Missing vehicles start
// at the garage.
using Placement = std::map<VehicleId, StopId>;

// Event-driven simulator bound to one scenario and one sampled event chain.
// All dynamic data lives in WorldState, so one simulator can drive many
// states and a state can be moved to another chain with rebind().
class Simulator {
 public:
  Simulator(const Scenario& scenario, const EventChain& chain, SimConfig config = {});

  [[nodiscard]] WorldState initial_state(std::uint64_t traffic_seed, const Placement& placement = {}) const;

  // Points a state copied from another chain at this one: future passenger
  // arrivals and in-flight breakdowns follow this chain from now on.
  void rebind(WorldState& state) const;

  [[nodiscard]] bool done(const WorldState& state) const;
  [[nodiscard]] Seconds next_event_time(const WorldState& state) const;

  // Processes the next event. Returns an epoch only when it offers a real
  // choice; epochs whose only option is NoAction pass silently.
  std::optional<DecisionEpoch> step(WorldState& state, EventLog* log = nullptr) const;

  // Steps until an epoch, the end of the day, or the next event lying past
  // `until`.
  std::optional<DecisionEpoch> advance(WorldState& state, Seconds until, EventLog* log = nullptr) const;

  [[nodiscard]] std::vector<Action> enumerate_actions(const WorldState& state, const EpochTrigger& trigger) const;

  // nullopt if feasible, otherwise the reason it is not.
  [[nodiscard]] std::optional<std::string> check_action(const WorldState& state, const Action& action) const;

  // Throws InfeasibleAction when check_action objects.
  void apply_action(WorldState& state, const Action& action, EventLog* log = nullptr) const;

  // Alighting then FIFO boarding for `vehicle` on `trip` at `stop_index`.
  BoardingResult board_and_alight(WorldState& state, VehicleId vehicle, TripId trip, std::int32_t stop_index) const;

  // Idle substitute closest to `target`, lowest id on ties; invalid if none.
  [[nodiscard]] VehicleId nearest_available(const WorldState& state, StopId target) const;

  [[nodiscard]] Seconds deadhead_seconds(double km) const;

  [[nodiscard]] const Scenario& scenario() const { return *scenario_; }
  [[nodiscard]] const TransitSchedule& schedule() const { return scenario_->schedule; }
  [[nodiscard]] const EventChain& chain() const { return *chain_; }
  [[nodiscard]] const SimConfig& config() const { return config_; }

 private:
  std::optional<DecisionEpoch> on_passenger_arrival(WorldState& s, const PassengerArrival& a, EventLog* log) const;
  std::optional<DecisionEpoch> on_bus_arrival(WorldState& s, const SimEvent& e, EventLog* log) const;
  std::optional<DecisionEpoch> on_disruption(WorldState& s, const SimEvent& e, EventLog* log) const;
  std::optional<DecisionEpoch> on_dispatch_arrival(WorldState& s, const SimEvent& e, EventLog* log) const;
  std::optional<DecisionEpoch> on_passenger_leave(WorldState& s, const SimEvent& e, EventLog* log) const;
  std::optional<DecisionEpoch> on_stationing_epoch(WorldState& s, EventLog* log) const;

  std::optional<DecisionEpoch> break_down(WorldState& s, VehicleId v, TripId trip, std::int32_t last_index,
                                          EventLog* log) const;
  void depart(WorldState& s, VehicleId v, TripId trip, std::int32_t from_index) const;
  void finish_trip(WorldState& s, VehicleId v, EventLog* log) const;
  std::optional<DecisionEpoch> offer(const WorldState& s, EpochTrigger trigger) const;
  [[nodiscard]] bool breaks_on(const WorldState& s, VehicleId v, TripId trip, std::int32_t stop_index) const;
  [[nodiscard]] Seconds breakdown_time(const WorldState& s, TripId trip, Seconds arrival) const;
  [[nodiscard]] bool has_next_trip(const WorldState& s, VehicleId v) const;

  const Scenario* scenario_;
  const EventChain* chain_;
  SimConfig config_;
};

// Conservation and sanity checks on a state. Empty means consistent.
std::vector<std::string> audit_state(const WorldState& state, const TransitSchedule& schedule);

}  // namespace stationing
