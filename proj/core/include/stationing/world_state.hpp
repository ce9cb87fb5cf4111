#pragma once

#include <cstdint>
#include <vector>

#include "stationing/types.hpp"

namespace stationing {

// What a vehicle is currently obliged to do.
enum class Duty : std::uint8_t {
  None,      // idle, or repositioning to a staging site
  Schedule,  // a regular bus working through its own trips
  Takeover,  // a substitute locked to a broken bus's remaining trips
  Coverage,  // a substitute serving the remainder of one overloaded trip
};

struct VehicleState {
  VehicleKind kind = VehicleKind::Regular;
  std::int32_t capacity = 0;
  std::int32_t occupancy = 0;
  VehicleStatus status = VehicleStatus::Idle;

  // Current stop, or the last stop passed while moving.
  StopId location;
  bool en_route = false;
  StopId destination;

  double deadhead_km = 0.0;
  double service_km = 0.0;

  Duty duty = Duty::None;
  // Trips are taken from schedule.trips_of(duty_source); duty_cursor indexes
  // the one being served. Coverage duty serves only `trip`.
  VehicleId duty_source;
  std::int32_t duty_cursor = 0;
  TripId trip;
  std::int32_t stop_index = -1;

  Seconds last_dispatch_epoch = kNever;

  // Set on breakdown.
  TripId broken_trip;
  std::int32_t broken_stop_index = -1;
  bool taken_over = false;

  [[nodiscard]] bool available() const {
    return kind == VehicleKind::Substitute && status == VehicleStatus::Idle && !en_route;
  }
};

struct PassengerGroup {
  std::int32_t id = 0;
  StopId stop;
  ServiceKey service;
  std::int32_t count = 0;
  Seconds arrival = 0;
  Seconds deadline = 0;
};

// Priority among events sharing a timestamp; lower runs first. Passengers
// arriving at t can board a bus at t, and a group can still board at its
// exact deadline.
enum class EventKind : std::uint8_t {
  PassengerArrival = 0,
  Disruption = 1,
  DispatchArrival = 2,
  BusArrival = 3,
  PassengerLeave = 4,
  StationingEpoch = 5,
};

const char* to_string(EventKind kind);

struct SimEvent {
  Seconds time = 0;
  EventKind kind = EventKind::BusArrival;
  // Vehicle index, or passenger group id for PassengerLeave.
  std::int32_t entity = -1;
  TripId trip;
  std::int32_t stop_index = -1;
  // Disruption: when the bus would otherwise have reached the stop.
  Seconds aux = 0;
  std::uint64_t seq = 0;
};

// Total order on (time, kind priority, entity, insertion sequence).
bool happens_before(const SimEvent& a, const SimEvent& b);

// Binary min-heap over SimEvent. Stored as a flat vector so world states
// copy cheaply.
class EventQueue {
 public:
  void push(const SimEvent& event);
  [[nodiscard]] const SimEvent& top() const { return heap_.front(); }
  SimEvent pop();
  [[nodiscard]] bool empty() const { return heap_.empty(); }
  [[nodiscard]] std::size_t size() const { return heap_.size(); }
  [[nodiscard]] const std::vector<SimEvent>& events() const { return heap_; }

  // Edit events in place, then restore heap order.
  template <class F>
  void rewrite(F&& f) {
    for (SimEvent& e : heap_) f(e);
    rebuild();
  }

 private:
  void rebuild();
  std::vector<SimEvent> heap_;
};

// Discounted running totals behind the reward. Every amount recorded at time
// t is weighted by discount^(t - origin).
struct RewardTally {
  Seconds origin = 0;
  double discount = 1.0;
  double served = 0.0;
  double left = 0.0;
  double deadhead_km = 0.0;
  double regular_km = 0.0;

  void reset(Seconds new_origin, double new_discount);
  [[nodiscard]] double weight(Seconds t) const;
  void add_served(Seconds t, double n) { served += n * weight(t); }
  void add_left(Seconds t, double n) { left += n * weight(t); }
  void add_deadhead(Seconds t, double km) { deadhead_km += km * weight(t); }
  void add_regular(Seconds t, double km) { regular_km += km * weight(t); }
};

// Dynamic snapshot of the service day. A plain value: copying it forks an
// independent simulation.
struct WorldState {
  Seconds clock = 0;
  std::vector<VehicleState> vehicles;
  // Per trip: the substitute covering it, if any.
  std::vector<VehicleId> trip_cover;
  // Waiting groups in arrival order.
  std::vector<PassengerGroup> waiting;

  std::int64_t generated = 0;
  // Boardings, less passengers put back on the street by a breakdown.
  std::int64_t served = 0;
  std::int64_t left = 0;
  std::int64_t delivered = 0;

  EventQueue pending;
  std::uint64_t next_seq = 0;
  std::int32_t next_group_id = 0;
  // Next unread passenger arrival in the bound event chain.
  std::size_t next_arrival = 0;
  // Keys stop-to-stop travel time draws.
  std::uint64_t traffic_seed = 0;
  // Substitute offered at the last periodic epoch (round robin).
  std::int32_t periodic_cursor = -1;

  RewardTally tally;

  [[nodiscard]] std::int64_t onboard() const;
  [[nodiscard]] std::int64_t waiting_count() const;

  void schedule(SimEvent event) {
    event.seq = next_seq++;
    pending.push(event);
  }
};

}  // namespace stationing
