#include "stationing/world_state.hpp"

#include <algorithm>
#include <cmath>

namespace stationing {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::PassengerArrival: return "passenger_arrival";
    case EventKind::Disruption: return "disruption";
    case EventKind::DispatchArrival: return "dispatch_arrival";
    case EventKind::BusArrival: return "bus_arrival";
    case EventKind::PassengerLeave: return "passenger_leave";
    case EventKind::StationingEpoch: return "stationing_epoch";
  }
  return "unknown";
}

bool happens_before(const SimEvent& a, const SimEvent& b) {
  if (a.time != b.time) return a.time < b.time;
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.entity != b.entity) return a.entity < b.entity;
  return a.seq < b.seq;
}

namespace {
struct Later {
  bool operator()(const SimEvent& a, const SimEvent& b) const { return happens_before(b, a); }
};
}  // namespace

void EventQueue::push(const SimEvent& event) {
  heap_.push_back(event);
  std::push_heap(heap_.begin(), heap_.end(), Later{});
}

SimEvent EventQueue::pop() {
  std::pop_heap(heap_.begin(), heap_.end(), Later{});
  SimEvent e = heap_.back();
  heap_.pop_back();
  return e;
}

void EventQueue::rebuild() { std::make_heap(heap_.begin(), heap_.end(), Later{}); }

void RewardTally::reset(Seconds new_origin, double new_discount) {
  *this = RewardTally{};
  origin = new_origin;
  discount = new_discount;
}

double RewardTally::weight(Seconds t) const {
  if (discount == 1.0) return 1.0;
  return std::pow(discount, static_cast<double>(t - origin));
}

std::int64_t WorldState::onboard() const {
  std::int64_t n = 0;
  for (const VehicleState& v : vehicles) n += v.occupancy;
  return n;
}

std::int64_t WorldState::waiting_count() const {
  std::int64_t n = 0;
  for (const PassengerGroup& g : waiting) n += g.count;
  return n;
}

}  // namespace stationing
