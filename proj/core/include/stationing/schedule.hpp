#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stationing/types.hpp"

namespace stationing {

struct Stop {
  std::string id;
  double x_km = 0.0;
  double y_km = 0.0;
  bool is_depot = false;
  // Set for declared stationing sites and for every depot.
  bool is_stationing_site = false;
};

struct TripStop {
  StopId stop;
  Seconds scheduled = 0;
};

struct Trip {
  std::string id;
  std::string route;
  std::int32_t direction = 0;
  ServiceKey service;
  std::vector<TripStop> stops;
  VehicleId vehicle;

  [[nodiscard]] std::int32_t last_index() const { return static_cast<std::int32_t>(stops.size()) - 1; }
  [[nodiscard]] Seconds start() const { return stops.front().scheduled; }
  [[nodiscard]] Seconds end() const { return stops.back().scheduled; }
};

struct VehicleSpec {
  std::string id;
  VehicleKind kind = VehicleKind::Regular;
  std::int32_t capacity = 0;
};

// Static universe of a service day: stops, fleet, trips and staging sites.
// Call `finalize()` after editing the tables so lookups and per-vehicle trip
// lists are rebuilt.
class TransitSchedule {
 public:
  std::vector<Stop> stops;
  std::vector<VehicleSpec> vehicles;
  std::vector<Trip> trips;
  // Candidate targets for stationing actions, in file order.
  std::vector<StopId> stationing_sites;
  StopId garage;

  void finalize();

  [[nodiscard]] std::optional<StopId> find_stop(std::string_view id) const;
  [[nodiscard]] std::optional<TripId> find_trip(std::string_view id) const;
  [[nodiscard]] std::optional<VehicleId> find_vehicle(std::string_view id) const;

  [[nodiscard]] const Stop& stop(StopId id) const { return stops[id.index()]; }
  [[nodiscard]] const Trip& trip(TripId id) const { return trips[id.index()]; }
  [[nodiscard]] const VehicleSpec& vehicle(VehicleId id) const { return vehicles[id.index()]; }

  // Trips of a regular vehicle in service order.
  [[nodiscard]] const std::vector<TripId>& trips_of(VehicleId id) const { return vehicle_trips_[id.index()]; }
  [[nodiscard]] const std::vector<VehicleId>& substitutes() const { return substitutes_; }
  [[nodiscard]] const std::vector<std::string>& routes() const { return routes_; }

  [[nodiscard]] Seconds service_start() const { return service_start_; }
  [[nodiscard]] Seconds service_end() const { return service_end_; }

  [[nodiscard]] bool can_stage_at(StopId id) const {
    return id.valid() && id.index() < stops.size() && stops[id.index()].is_stationing_site;
  }

 private:
  std::unordered_map<std::string, StopId> stop_index_;
  std::unordered_map<std::string, TripId> trip_index_;
  std::unordered_map<std::string, VehicleId> vehicle_index_;
  std::vector<std::vector<TripId>> vehicle_trips_;
  std::vector<VehicleId> substitutes_;
  std::vector<std::string> routes_;
  Seconds service_start_ = 0;
  Seconds service_end_ = 0;
};

struct Violation {
  std::string entity;
  std::string rule;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// Checks every stop, trip and fleet invariant. An empty result means the
// schedule is well formed.
std::vector<Violation> validate_schedule(const TransitSchedule& schedule);

// JSON schedule documents. Structural problems (missing fields, dangling
// references) raise ConfigError; invariant problems are left to
// validate_schedule.
TransitSchedule read_schedule(std::istream& in);
TransitSchedule load_schedule(const std::filesystem::path& path);
void write_schedule(std::ostream& out, const TransitSchedule& schedule);
void save_schedule(const std::filesystem::path& path, const TransitSchedule& schedule);

}  // namespace stationing
