#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <unordered_map>
#include <vector>

#include "stationing/distance.hpp"
#include "stationing/random.hpp"
#include "stationing/schedule.hpp"

namespace stationing {

// --- generative models ---------------------------------------------------------

struct OccupancyBin {
  std::int32_t low = 0;
  std::int32_t high = 0;
  double probability = 0.0;
};

// Forecast occupancy distribution for every (trip, stop index), stored as
// bins[trip][stop_index].
struct OccupancyModel {
  std::vector<std::vector<std::vector<OccupancyBin>>> bins;
};

struct TripDisruptionModel {
  double probability = 0.0;
  // Categorical weights over the trip's stop indices.
  std::vector<double> stop_weights;
};

struct DisruptionModel {
  std::vector<TripDisruptionModel> trips;
};

// Empirical stop-to-stop travel durations with a distance-derived fallback.
class TravelTimeModel {
 public:
  void add_samples(StopId from, StopId to, std::vector<Seconds> samples);
  void set_fallback(StopId from, StopId to, Seconds duration);

  // Fills fallbacks for every consecutive stop pair of every trip from the
  // distance matrix at `speed_kmh`.
  void fill_fallbacks(const TransitSchedule& schedule, const DistanceMatrix& distances, double speed_kmh);

  [[nodiscard]] const std::vector<Seconds>* samples(StopId from, StopId to) const;
  [[nodiscard]] std::optional<Seconds> fallback(StopId from, StopId to) const;
  [[nodiscard]] bool covers(StopId from, StopId to) const;

  [[nodiscard]] const std::unordered_map<std::uint64_t, std::vector<Seconds>>& all_samples() const { return samples_; }
  [[nodiscard]] double fallback_speed_kmh() const { return fallback_speed_kmh_; }

 private:
  static std::uint64_t key(StopId from, StopId to) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(from.value)) << 32) |
           static_cast<std::uint32_t>(to.value);
  }
  std::unordered_map<std::uint64_t, std::vector<Seconds>> samples_;
  std::unordered_map<std::uint64_t, Seconds> fallback_;
  double fallback_speed_kmh_ = 0.0;
};

// Everything a simulation needs besides the sampled event chain.
struct Scenario {
  TransitSchedule schedule;
  OccupancyModel occupancy;
  DisruptionModel disruptions;
  TravelTimeModel travel;
  DistanceMatrix distances;
};

// --- event chains ----------------------------------------------------------------

struct PassengerArrival {
  Seconds time = 0;
  StopId stop;
  ServiceKey service;
  std::int32_t count = 0;
  TripId trip;
  std::int32_t stop_index = 0;
};

struct DisruptionDraw {
  TripId trip;
  std::int32_t stop_index = 0;
  Seconds time = 0;

  friend bool operator==(const DisruptionDraw&, const DisruptionDraw&) = default;
};

// One sampled realization of a service day.
struct EventChain {
  std::uint64_t seed = 0;
  // [trip][stop_index]
  std::vector<std::vector<std::int32_t>> occupancy;
  std::vector<std::vector<std::int32_t>> boardings;
  std::vector<std::vector<std::int32_t>> alightings;
  // Passenger groups sorted by (time, trip, stop_index).
  std::vector<PassengerArrival> arrivals;
  std::vector<DisruptionDraw> disruptions;
  // Per trip: stop index of the sampled disruption, or -1.
  std::vector<std::int32_t> disruption_stop;
  std::vector<Seconds> disruption_time;

  // Share of the on-board load that leaves the bus at a non-terminal stop.
  [[nodiscard]] double alight_fraction(TripId trip, std::int32_t stop_index) const;
  void index_disruptions(std::size_t trip_count);
};

struct Flows {
  std::vector<std::int32_t> boardings;
  std::vector<std::int32_t> alightings;
};

// Minimal-flow decomposition of a per-stop occupancy trace: a rise is all
// boarding, a fall is all alighting, and the last stop additionally alights
// whatever remains.
Flows derive_flows(std::span<const std::int32_t> trace);

inline constexpr Seconds kArrivalWindow = 600;

// Draws a bin per (trip, stop), an occupancy uniformly inside it, derives
// flows, and spreads each stop's boardings uniformly over the
// `kArrivalWindow` seconds before the scheduled arrival. Disruptions are not
// drawn here.
EventChain sample_occupancy_chain(const OccupancyModel& model, const TransitSchedule& schedule, std::uint64_t seed);

// Two-step disruption draw: one Bernoulli per trip, then a stop index from
// the trip's stop distribution. The time is the scheduled arrival there.
std::vector<DisruptionDraw> sample_disruptions(const DisruptionModel& model, const TransitSchedule& schedule,
                                               std::uint64_t seed);

// Occupancy plus disruptions, each from its own derived seed.
EventChain sample_event_chain(const Scenario& scenario, std::uint64_t seed);

Seconds sample_travel_time(const TravelTimeModel& model, StopId from, StopId to, Rng& rng);

// Structural checks against the schedule. Throws ConfigError naming the
// first gap or malformed entry.
void check_occupancy_model(const OccupancyModel& model, const TransitSchedule& schedule);
void check_disruption_model(const DisruptionModel& model, const TransitSchedule& schedule);
void check_travel_model(const TravelTimeModel& model, const TransitSchedule& schedule);

// --- synthetic scenarios -----------------------------------------------------------

struct GeneratorSpec {
  std::int32_t routes = 4;
  std::int32_t stops_per_route = 12;
  std::int32_t buses_per_route = 2;
  std::int32_t trips_per_bus = 8;
  std::int32_t substitutes = 5;
  std::int32_t stationing_sites = 25;
  std::int32_t capacity = 40;
  // Mean forecast load at the busiest point of a peak trip, as a share of
  // capacity.
  double demand_level = 0.8;
  // Expected disruptions per simulated day.
  double disruptions_per_day = 3.0;
  double area_km = 16.0;
  double stop_spacing_km = 0.8;
  double scheduled_speed_kmh = 18.0;
  Seconds dwell = 30;
  Seconds layover = 600;
  Seconds service_start = 6 * 3600;
  double detour_factor = 1.25;
  std::int32_t travel_samples = 8;
  double fallback_speed_kmh = 30.0;
};

// Builds a mutually consistent scenario bundle. Throws ConfigError on an
// infeasible spec.
Scenario synthesize_scenario(const GeneratorSpec& spec, std::uint64_t seed);

void check_generator_spec(const GeneratorSpec& spec);

// --- files ---------------------------------------------------------------------------

// A scenario directory holds schedule.json, occupancy.json,
// disruptions.json, travel_times.json and distances.csv.
void save_scenario(const std::filesystem::path& dir, const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& dir);

}  // namespace stationing
