#include <algorithm>
#include <fstream>

#include "json_util.hpp"
#include "stationing/scenario.hpp"

namespace stationing {

using detail::json;

namespace {

TripId resolve_trip(const TransitSchedule& s, const std::string& id, const std::string& where) {
  auto t = s.find_trip(id);
  if (!t) throw ConfigError(where + ": unknown trip '" + id + "'");
  return *t;
}

StopId resolve_stop(const TransitSchedule& s, const std::string& id, const std::string& where) {
  auto t = s.find_stop(id);
  if (!t) throw ConfigError(where + ": unknown stop '" + id + "'");
  return *t;
}

json occupancy_to_json(const OccupancyModel& m, const TransitSchedule& s) {
  json trips = json::object();
  for (std::size_t i = 0; i < m.bins.size(); ++i) {
    json stops = json::array();
    for (const auto& bins : m.bins[i]) {
      json jb = json::array();
      for (const OccupancyBin& b : bins) jb.push_back({{"low", b.low}, {"high", b.high}, {"p", b.probability}});
      stops.push_back(std::move(jb));
    }
    trips[s.trips[i].id] = std::move(stops);
  }
  return {{"version", 1}, {"trips", std::move(trips)}};
}

OccupancyModel occupancy_from_json(const json& doc, const TransitSchedule& s) {
  detail::check_version(doc, "occupancy");
  OccupancyModel m;
  m.bins.resize(s.trips.size());
  std::vector<bool> seen(s.trips.size(), false);
  const json& trips = detail::require(doc, "trips", "occupancy");
  if (!trips.is_object()) throw ConfigError("occupancy.trips: expected an object keyed by trip id");
  for (auto it = trips.begin(); it != trips.end(); ++it) {
    const std::string where = "occupancy trip " + it.key();
    const TripId t = resolve_trip(s, it.key(), "occupancy");
    seen[t.index()] = true;
    if (!it->is_array()) throw ConfigError(where + ": expected an array of stops");
    for (const json& stop : *it) {
      if (!stop.is_array()) throw ConfigError(where + ": expected an array of bins");
      std::vector<OccupancyBin> bins;
      for (const json& jb : stop) {
        bins.push_back(OccupancyBin{detail::field<std::int32_t>(jb, "low", where),
                                    detail::field<std::int32_t>(jb, "high", where),
                                    detail::field<double>(jb, "p", where)});
      }
      m.bins[t.index()].push_back(std::move(bins));
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw ConfigError("occupancy model: missing trip " + s.trips[i].id);
  }
  check_occupancy_model(m, s);
  return m;
}

json disruptions_to_json(const DisruptionModel& m, const TransitSchedule& s) {
  json trips = json::object();
  for (std::size_t i = 0; i < m.trips.size(); ++i) {
    trips[s.trips[i].id] = {{"probability", m.trips[i].probability}, {"stop_weights", m.trips[i].stop_weights}};
  }
  return {{"version", 1}, {"trips", std::move(trips)}};
}

DisruptionModel disruptions_from_json(const json& doc, const TransitSchedule& s) {
  detail::check_version(doc, "disruptions");
  DisruptionModel m;
  m.trips.resize(s.trips.size());
  std::vector<bool> seen(s.trips.size(), false);
  const json& trips = detail::require(doc, "trips", "disruptions");
  if (!trips.is_object()) throw ConfigError("disruptions.trips: expected an object keyed by trip id");
  for (auto it = trips.begin(); it != trips.end(); ++it) {
    const std::string where = "disruption trip " + it.key();
    const TripId t = resolve_trip(s, it.key(), "disruptions");
    seen[t.index()] = true;
    m.trips[t.index()].probability = detail::field<double>(*it, "probability", where);
    m.trips[t.index()].stop_weights = detail::field<std::vector<double>>(*it, "stop_weights", where);
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw ConfigError("disruption model: missing trip " + s.trips[i].id);
  }
  check_disruption_model(m, s);
  return m;
}

json travel_to_json(const TravelTimeModel& m, const TransitSchedule& s) {
  std::vector<std::pair<std::uint64_t, const std::vector<Seconds>*>> pairs;
  for (const auto& [key, samples] : m.all_samples()) pairs.emplace_back(key, &samples);
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  json out = json::array();
  for (const auto& [key, samples] : pairs) {
    const StopId from(static_cast<std::int32_t>(key >> 32));
    const StopId to(static_cast<std::int32_t>(key & 0xffffffffULL));
    out.push_back({{"from", s.stop(from).id}, {"to", s.stop(to).id}, {"samples", *samples}});
  }
  return {{"version", 1}, {"fallback_speed_kmh", m.fallback_speed_kmh()}, {"pairs", std::move(out)}};
}

TravelTimeModel travel_from_json(const json& doc, const TransitSchedule& s, const DistanceMatrix& d) {
  detail::check_version(doc, "travel_times");
  TravelTimeModel m;
  for (const json& jp : detail::require(doc, "pairs", "travel_times")) {
    const StopId from = resolve_stop(s, detail::field<std::string>(jp, "from", "travel_times.pairs[]"), "travel_times");
    const StopId to = resolve_stop(s, detail::field<std::string>(jp, "to", "travel_times.pairs[]"), "travel_times");
    m.add_samples(from, to, detail::field<std::vector<Seconds>>(jp, "samples", "travel_times.pairs[]"));
  }
  if (auto it = doc.find("fallbacks"); it != doc.end()) {
    for (const json& jf : *it) {
      const StopId from = resolve_stop(s, detail::field<std::string>(jf, "from", "travel_times.fallbacks[]"), "travel_times");
      const StopId to = resolve_stop(s, detail::field<std::string>(jf, "to", "travel_times.fallbacks[]"), "travel_times");
      m.set_fallback(from, to, detail::field<Seconds>(jf, "seconds", "travel_times.fallbacks[]"));
    }
  }
  const double speed = detail::field_or<double>(doc, "fallback_speed_kmh", 0.0, "travel_times");
  if (speed > 0.0) m.fill_fallbacks(s, d, speed);
  check_travel_model(m, s);
  return m;
}

}  // namespace

void save_scenario(const std::filesystem::path& dir, const Scenario& sc) {
  std::filesystem::create_directories(dir);
  save_schedule(dir / "schedule.json", sc.schedule);
  detail::save_json(dir / "occupancy.json", occupancy_to_json(sc.occupancy, sc.schedule));
  detail::save_json(dir / "disruptions.json", disruptions_to_json(sc.disruptions, sc.schedule));
  detail::save_json(dir / "travel_times.json", travel_to_json(sc.travel, sc.schedule));
  std::ofstream csv(dir / "distances.csv");
  if (!csv) throw ConfigError("cannot write " + (dir / "distances.csv").string());
  write_distance_csv(csv, sc.distances, sc.schedule);
}

Scenario load_scenario(const std::filesystem::path& dir) {
  Scenario sc;
  sc.schedule = load_schedule(dir / "schedule.json");
  sc.distances = load_distance_csv(dir / "distances.csv", sc.schedule);
  sc.occupancy = occupancy_from_json(detail::load_json(dir / "occupancy.json"), sc.schedule);
  sc.disruptions = disruptions_from_json(detail::load_json(dir / "disruptions.json"), sc.schedule);
  sc.travel = travel_from_json(detail::load_json(dir / "travel_times.json"), sc.schedule, sc.distances);
  return sc;
}

}  // namespace stationing
