#include "stationing/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace stationing {

// --- travel times ------------------------------------------------------------------

void TravelTimeModel::add_samples(StopId from, StopId to, std::vector<Seconds> samples) {
  for (Seconds s : samples) {
    if (s <= 0) throw ConfigError("travel time samples must be positive");
  }
  auto& slot = samples_[key(from, to)];
  slot.insert(slot.end(), samples.begin(), samples.end());
}

void TravelTimeModel::set_fallback(StopId from, StopId to, Seconds duration) {
  if (duration <= 0) throw ConfigError("fallback travel time must be positive");
  fallback_[key(from, to)] = duration;
}

void TravelTimeModel::fill_fallbacks(const TransitSchedule& schedule, const DistanceMatrix& distances,
                                     double speed_kmh) {
  if (!(speed_kmh > 0.0)) throw ConfigError("fallback speed must be positive");
  fallback_speed_kmh_ = speed_kmh;
  for (const Trip& trip : schedule.trips) {
    for (std::size_t j = 1; j < trip.stops.size(); ++j) {
      const StopId a = trip.stops[j - 1].stop;
      const StopId b = trip.stops[j].stop;
      const auto seconds = static_cast<Seconds>(std::ceil(distances(a, b) / speed_kmh * 3600.0));
      fallback_.try_emplace(key(a, b), std::max<Seconds>(1, seconds));
    }
  }
}

const std::vector<Seconds>* TravelTimeModel::samples(StopId from, StopId to) const {
  auto it = samples_.find(key(from, to));
  if (it == samples_.end() || it->second.empty()) return nullptr;
  return &it->second;
}

std::optional<Seconds> TravelTimeModel::fallback(StopId from, StopId to) const {
  auto it = fallback_.find(key(from, to));
  if (it == fallback_.end()) return std::nullopt;
  return it->second;
}

bool TravelTimeModel::covers(StopId from, StopId to) const {
  return samples(from, to) != nullptr || fallback(from, to).has_value();
}

Seconds sample_travel_time(const TravelTimeModel& model, StopId from, StopId to, Rng& rng) {
  if (const auto* set = model.samples(from, to)) return (*set)[rng.index(set->size())];
  if (auto fb = model.fallback(from, to)) return *fb;
  throw ConfigError("no travel time samples or fallback for stop pair " + std::to_string(from.value) + " -> " +
                    std::to_string(to.value));
}

// --- flows and chains ----------------------------------------------------------------

Flows derive_flows(std::span<const std::int32_t> trace) {
  Flows f;
  f.boardings.assign(trace.size(), 0);
  f.alightings.assign(trace.size(), 0);
  std::int32_t prev = 0;
  for (std::size_t j = 0; j < trace.size(); ++j) {
    const std::int32_t now = std::max(0, trace[j]);
    if (now > prev) {
      f.boardings[j] = now - prev;
    } else {
      f.alightings[j] = prev - now;
    }
    prev = now;
  }
  if (!trace.empty()) f.alightings.back() += prev;
  return f;
}

double EventChain::alight_fraction(TripId trip, std::int32_t stop_index) const {
  if (stop_index <= 0) return 0.0;
  const auto& occ = occupancy[trip.index()];
  const std::int32_t before = occ[static_cast<std::size_t>(stop_index - 1)];
  if (before <= 0) return 0.0;
  return static_cast<double>(alightings[trip.index()][static_cast<std::size_t>(stop_index)]) / before;
}

void EventChain::index_disruptions(std::size_t trip_count) {
  disruption_stop.assign(trip_count, -1);
  disruption_time.assign(trip_count, 0);
  for (const DisruptionDraw& d : disruptions) {
    disruption_stop[d.trip.index()] = d.stop_index;
    disruption_time[d.trip.index()] = d.time;
  }
}

void check_occupancy_model(const OccupancyModel& model, const TransitSchedule& schedule) {
  if (model.bins.size() != schedule.trips.size()) {
    throw ConfigError("occupancy model covers " + std::to_string(model.bins.size()) + " trips, schedule has " +
                      std::to_string(schedule.trips.size()));
  }
  for (std::size_t i = 0; i < schedule.trips.size(); ++i) {
    const Trip& trip = schedule.trips[i];
    if (model.bins[i].size() != trip.stops.size()) {
      throw ConfigError("occupancy model: trip " + trip.id + " has " + std::to_string(model.bins[i].size()) +
                        " stop entries, expected " + std::to_string(trip.stops.size()));
    }
    for (std::size_t j = 0; j < trip.stops.size(); ++j) {
      const auto& bins = model.bins[i][j];
      const std::string where = "occupancy model: trip " + trip.id + " stop index " + std::to_string(j);
      if (bins.empty()) throw ConfigError(where + " has no bins");
      double total = 0.0;
      for (std::size_t k = 0; k < bins.size(); ++k) {
        const OccupancyBin& b = bins[k];
        if (b.low < 0 || b.low > b.high) throw ConfigError(where + ": bin bounds out of order");
        if (!(b.probability >= 0.0 && b.probability <= 1.0)) throw ConfigError(where + ": bad probability");
        if (k > 0 && b.low <= bins[k - 1].high) throw ConfigError(where + ": bins overlap or are unsorted");
        total += b.probability;
      }
      if (std::abs(total - 1.0) > 1e-9) throw ConfigError(where + ": probabilities sum to " + std::to_string(total));
    }
  }
}

void check_disruption_model(const DisruptionModel& model, const TransitSchedule& schedule) {
  if (model.trips.size() != schedule.trips.size()) {
    throw ConfigError("disruption model covers " + std::to_string(model.trips.size()) + " trips, schedule has " +
                      std::to_string(schedule.trips.size()));
  }
  for (std::size_t i = 0; i < schedule.trips.size(); ++i) {
    const Trip& trip = schedule.trips[i];
    const TripDisruptionModel& m = model.trips[i];
    const std::string where = "disruption model: trip " + trip.id;
    if (!(m.probability >= 0.0 && m.probability <= 1.0)) throw ConfigError(where + ": probability outside [0,1]");
    if (m.stop_weights.size() != trip.stops.size()) throw ConfigError(where + ": stop distribution length mismatch");
    double total = 0.0;
    for (double w : m.stop_weights) {
      if (!(w >= 0.0)) throw ConfigError(where + ": negative stop weight");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError(where + ": stop distribution sums to " + std::to_string(total));
  }
}

void check_travel_model(const TravelTimeModel& model, const TransitSchedule& schedule) {
  for (const Trip& trip : schedule.trips) {
    for (std::size_t j = 1; j < trip.stops.size(); ++j) {
      if (!model.covers(trip.stops[j - 1].stop, trip.stops[j].stop)) {
        throw ConfigError("travel time model: trip " + trip.id + " segment " + std::to_string(j - 1) + "->" +
                          std::to_string(j) + " has neither samples nor a fallback");
      }
    }
  }
}

EventChain sample_occupancy_chain(const OccupancyModel& model, const TransitSchedule& schedule, std::uint64_t seed) {
  check_occupancy_model(model, schedule);
  Rng rng(seed);
  EventChain chain;
  chain.seed = seed;
  const std::size_t trips = schedule.trips.size();
  chain.occupancy.resize(trips);
  chain.boardings.resize(trips);
  chain.alightings.resize(trips);

  std::vector<double> weights;
  for (std::size_t i = 0; i < trips; ++i) {
    const Trip& trip = schedule.trips[i];
    auto& trace = chain.occupancy[i];
    trace.resize(trip.stops.size());
    for (std::size_t j = 0; j < trip.stops.size(); ++j) {
      const auto& bins = model.bins[i][j];
      weights.clear();
      for (const OccupancyBin& b : bins) weights.push_back(b.probability);
      const std::size_t pick = rng.categorical(weights);
      const OccupancyBin& bin = bins[std::min(pick, bins.size() - 1)];
      trace[j] = static_cast<std::int32_t>(rng.uniform_int(bin.low, bin.high));
    }
    Flows flows = derive_flows(trace);
    chain.boardings[i] = std::move(flows.boardings);
    chain.alightings[i] = std::move(flows.alightings);

    // Nobody rides onward from a trip's final stop, so boardings there are
    // not materialized as waiting passengers.
    for (std::size_t j = 0; j + 1 < trip.stops.size(); ++j) {
      const std::int32_t count = chain.boardings[i][j];
      if (count <= 0) continue;
      PassengerArrival a;
      a.time = std::max<Seconds>(0, trip.stops[j].scheduled - rng.uniform_int(0, kArrivalWindow));
      a.stop = trip.stops[j].stop;
      a.service = trip.service;
      a.count = count;
      a.trip = TripId(i);
      a.stop_index = static_cast<std::int32_t>(j);
      chain.arrivals.push_back(a);
    }
  }
  std::stable_sort(chain.arrivals.begin(), chain.arrivals.end(),
                   [](const PassengerArrival& x, const PassengerArrival& y) {
                     if (x.time != y.time) return x.time < y.time;
                     if (x.trip != y.trip) return x.trip < y.trip;
                     return x.stop_index < y.stop_index;
                   });
  chain.index_disruptions(trips);
  return chain;
}

std::vector<DisruptionDraw> sample_disruptions(const DisruptionModel& model, const TransitSchedule& schedule,
                                               std::uint64_t seed) {
  check_disruption_model(model, schedule);
  Rng rng(seed);
  std::vector<DisruptionDraw> out;
  for (std::size_t i = 0; i < schedule.trips.size(); ++i) {
    const TripDisruptionModel& m = model.trips[i];
    if (!rng.bernoulli(m.probability)) continue;
    const std::size_t j = rng.categorical(m.stop_weights);
    if (j >= m.stop_weights.size()) continue;
    out.push_back(DisruptionDraw{TripId(i), static_cast<std::int32_t>(j), schedule.trips[i].stops[j].scheduled});
  }
  return out;
}

EventChain sample_event_chain(const Scenario& scenario, std::uint64_t seed) {
  EventChain chain =
      sample_occupancy_chain(scenario.occupancy, scenario.schedule, derive_seed(seed, SeedStream::Occupancy, 0));
  chain.seed = seed;
  chain.disruptions =
      sample_disruptions(scenario.disruptions, scenario.schedule, derive_seed(seed, SeedStream::Disruption, 0));
  chain.index_disruptions(scenario.schedule.trips.size());
  return chain;
}

}  // namespace stationing
