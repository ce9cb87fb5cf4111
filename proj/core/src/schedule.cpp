#include "stationing/schedule.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "json_util.hpp"

namespace stationing {

using detail::json;

const char* to_string(VehicleKind kind) {
  return kind == VehicleKind::Regular ? "regular" : "substitute";
}

const char* to_string(VehicleStatus status) {
  switch (status) {
    case VehicleStatus::InTransit: return "in_transit";
    case VehicleStatus::Idle: return "idle";
    case VehicleStatus::OutOfService: return "out_of_service";
  }
  return "unknown";
}

void TransitSchedule::finalize() {
  stop_index_.clear();
  trip_index_.clear();
  vehicle_index_.clear();
  for (std::size_t i = 0; i < stops.size(); ++i) {
    stop_index_.try_emplace(stops[i].id, StopId(i));
    stops[i].is_stationing_site = stops[i].is_depot;
  }
  for (StopId site : stationing_sites) {
    if (site.valid() && site.index() < stops.size()) stops[site.index()].is_stationing_site = true;
  }
  for (std::size_t i = 0; i < vehicles.size(); ++i) vehicle_index_.try_emplace(vehicles[i].id, VehicleId(i));

  routes_.clear();
  std::unordered_map<std::string, std::int32_t> route_ids;
  for (std::size_t i = 0; i < trips.size(); ++i) {
    Trip& trip = trips[i];
    trip_index_.try_emplace(trip.id, TripId(i));
    auto [it, inserted] = route_ids.try_emplace(trip.route, static_cast<std::int32_t>(routes_.size()));
    if (inserted) routes_.push_back(trip.route);
    trip.service = ServiceKey{it->second, trip.direction};
  }

  vehicle_trips_.assign(vehicles.size(), {});
  for (std::size_t i = 0; i < trips.size(); ++i) {
    const VehicleId v = trips[i].vehicle;
    if (v.valid() && v.index() < vehicles.size() && !trips[i].stops.empty()) {
      vehicle_trips_[v.index()].push_back(TripId(i));
    }
  }
  for (auto& list : vehicle_trips_) {
    std::stable_sort(list.begin(), list.end(), [this](TripId a, TripId b) {
      return trips[a.index()].start() < trips[b.index()].start();
    });
  }

  substitutes_.clear();
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    if (vehicles[i].kind == VehicleKind::Substitute) substitutes_.emplace_back(i);
  }

  service_start_ = 0;
  service_end_ = 0;
  bool first = true;
  for (const Trip& trip : trips) {
    if (trip.stops.empty()) continue;
    service_start_ = first ? trip.start() : std::min(service_start_, trip.start());
    service_end_ = first ? trip.end() : std::max(service_end_, trip.end());
    first = false;
  }
}

std::optional<StopId> TransitSchedule::find_stop(std::string_view id) const {
  auto it = stop_index_.find(std::string(id));
  if (it == stop_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<TripId> TransitSchedule::find_trip(std::string_view id) const {
  auto it = trip_index_.find(std::string(id));
  if (it == trip_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<VehicleId> TransitSchedule::find_vehicle(std::string_view id) const {
  auto it = vehicle_index_.find(std::string(id));
  if (it == vehicle_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Violation> validate_schedule(const TransitSchedule& s) {
  std::vector<Violation> out;
  auto add = [&out](std::string entity, std::string rule) {
    out.push_back(Violation{std::move(entity), std::move(rule)});
  };
  auto stop_ok = [&s](StopId id) { return id.valid() && id.index() < s.stops.size(); };

  std::set<std::string> seen;
  for (const Stop& stop : s.stops) {
    if (!seen.insert(stop.id).second) add("stop " + stop.id, "duplicate stop id");
    if (stop.is_depot && !stop.is_stationing_site) add("stop " + stop.id, "depot is not a stationing site");
  }
  if (!stop_ok(s.garage)) {
    add("garage", "garage is not a known stop");
  } else if (!s.stop(s.garage).is_depot) {
    add("stop " + s.stop(s.garage).id, "garage is not a depot");
  }

  std::set<std::int32_t> sites;
  for (StopId site : s.stationing_sites) {
    if (!stop_ok(site)) {
      add("stationing_sites", "unknown stationing site");
    } else if (!sites.insert(site.value).second) {
      add("stop " + s.stop(site).id, "stationing site listed twice");
    }
  }

  seen.clear();
  for (const VehicleSpec& v : s.vehicles) {
    if (!seen.insert(v.id).second) add("vehicle " + v.id, "duplicate vehicle id");
    if (v.capacity <= 0) add("vehicle " + v.id, "capacity must be positive");
  }

  seen.clear();
  for (const Trip& trip : s.trips) {
    const std::string name = "trip " + trip.id;
    if (!seen.insert(trip.id).second) add(name, "duplicate trip id");
    if (!trip.vehicle.valid() || trip.vehicle.index() >= s.vehicles.size()) {
      add(name, "unknown vehicle");
    } else if (s.vehicle(trip.vehicle).kind != VehicleKind::Regular) {
      add(name, "trip assigned to a substitute vehicle");
    }
    if (trip.stops.size() < 2) {
      add(name, "fewer than two stops");
      continue;
    }
    bool refs_ok = true;
    for (const TripStop& ts : trip.stops) refs_ok = refs_ok && stop_ok(ts.stop);
    if (!refs_ok) {
      add(name, "unknown stop");
      continue;
    }
    for (std::size_t j = 1; j < trip.stops.size(); ++j) {
      if (trip.stops[j].scheduled <= trip.stops[j - 1].scheduled) {
        add(name, "non-increasing schedule at stop index " + std::to_string(j));
      }
    }
    if (!s.stop(trip.stops.front().stop).is_stationing_site) {
      add(name, "first stop is neither a depot nor a staging area");
    }
    if (!s.stop(trip.stops.back().stop).is_stationing_site) {
      add(name, "last stop is neither a depot nor a staging area");
    }
  }

  for (std::size_t v = 0; v < s.vehicles.size(); ++v) {
    const auto& list = s.trips_of(VehicleId(v));
    for (std::size_t k = 1; k < list.size(); ++k) {
      const Trip& prev = s.trip(list[k - 1]);
      const Trip& next = s.trip(list[k]);
      if (prev.stops.size() < 2 || next.stops.size() < 2) continue;
      if (next.start() <= prev.end()) {
        add("vehicle " + s.vehicles[v].id, "trips " + prev.id + " and " + next.id + " overlap");
      }
    }
  }
  return out;
}

TransitSchedule read_schedule(std::istream& in) {
  using detail::field;
  using detail::require;
  const json doc = detail::parse_json(in, "schedule");
  detail::check_version(doc, "schedule");

  TransitSchedule s;
  std::unordered_map<std::string, StopId> stops;
  for (const json& js : require(doc, "stops", "schedule")) {
    Stop stop;
    stop.id = field<std::string>(js, "id", "schedule.stops[]");
    stop.x_km = field<double>(js, "x", "stop " + stop.id);
    stop.y_km = field<double>(js, "y", "stop " + stop.id);
    stop.is_depot = detail::field_or<bool>(js, "depot", false, "stop " + stop.id);
    stops.try_emplace(stop.id, StopId(s.stops.size()));
    s.stops.push_back(std::move(stop));
  }
  auto resolve_stop = [&stops](const std::string& id, const std::string& where) {
    auto it = stops.find(id);
    if (it == stops.end()) throw ConfigError(where + ": unknown stop '" + id + "'");
    return it->second;
  };

  s.garage = resolve_stop(field<std::string>(doc, "garage", "schedule"), "schedule.garage");
  for (const json& site : require(doc, "stationing_sites", "schedule")) {
    s.stationing_sites.push_back(resolve_stop(detail::get_as<std::string>(site, "stationing_sites[]"),
                                              "schedule.stationing_sites"));
  }

  std::unordered_map<std::string, VehicleId> vehicles;
  for (const json& jv : require(doc, "vehicles", "schedule")) {
    VehicleSpec v;
    v.id = field<std::string>(jv, "id", "schedule.vehicles[]");
    const auto kind = field<std::string>(jv, "kind", "vehicle " + v.id);
    if (kind == "regular") {
      v.kind = VehicleKind::Regular;
    } else if (kind == "substitute") {
      v.kind = VehicleKind::Substitute;
    } else {
      throw ConfigError("vehicle " + v.id + ": kind must be 'regular' or 'substitute'");
    }
    v.capacity = field<std::int32_t>(jv, "capacity", "vehicle " + v.id);
    vehicles.try_emplace(v.id, VehicleId(s.vehicles.size()));
    s.vehicles.push_back(std::move(v));
  }

  for (const json& jt : require(doc, "trips", "schedule")) {
    Trip trip;
    trip.id = field<std::string>(jt, "id", "schedule.trips[]");
    const std::string where = "trip " + trip.id;
    trip.route = field<std::string>(jt, "route", where);
    trip.direction = field<std::int32_t>(jt, "direction", where);
    const auto vehicle = field<std::string>(jt, "vehicle", where);
    auto it = vehicles.find(vehicle);
    if (it == vehicles.end()) throw ConfigError(where + ": unknown vehicle '" + vehicle + "'");
    trip.vehicle = it->second;
    for (const json& js : require(jt, "stops", where)) {
      TripStop ts;
      ts.stop = resolve_stop(field<std::string>(js, "stop", where), where);
      ts.scheduled = field<Seconds>(js, "time", where);
      trip.stops.push_back(ts);
    }
    s.trips.push_back(std::move(trip));
  }
  s.finalize();
  return s;
}

TransitSchedule load_schedule(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_schedule(in);
}

void write_schedule(std::ostream& out, const TransitSchedule& s) {
  json doc;
  doc["version"] = 1;
  doc["garage"] = s.stop(s.garage).id;
  json stops = json::array();
  for (const Stop& stop : s.stops) {
    stops.push_back({{"id", stop.id}, {"x", stop.x_km}, {"y", stop.y_km}, {"depot", stop.is_depot}});
  }
  doc["stops"] = std::move(stops);
  json sites = json::array();
  for (StopId site : s.stationing_sites) sites.push_back(s.stop(site).id);
  doc["stationing_sites"] = std::move(sites);
  json vehicles = json::array();
  for (const VehicleSpec& v : s.vehicles) {
    vehicles.push_back({{"id", v.id}, {"kind", to_string(v.kind)}, {"capacity", v.capacity}});
  }
  doc["vehicles"] = std::move(vehicles);
  json trips = json::array();
  for (const Trip& trip : s.trips) {
    json ts = json::array();
    for (const TripStop& st : trip.stops) ts.push_back({{"stop", s.stop(st.stop).id}, {"time", st.scheduled}});
    trips.push_back({{"id", trip.id},
                     {"route", trip.route},
                     {"direction", trip.direction},
                     {"vehicle", s.vehicle(trip.vehicle).id},
                     {"stops", std::move(ts)}});
  }
  doc["trips"] = std::move(trips);
  out << doc.dump(2) << '\n';
}

void save_schedule(const std::filesystem::path& path, const TransitSchedule& schedule) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_schedule(out, schedule);
}

}  // namespace stationing
