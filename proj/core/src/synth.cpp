#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stationing/scenario.hpp"

namespace stationing {

namespace {

std::string padded(std::int64_t value, int width) {
  std::string s = std::to_string(value);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

// Relative demand by time of day: a base level with morning and evening peaks.
double time_of_day_factor(Seconds t) {
  const double h = static_cast<double>(t) / 3600.0;
  auto bump = [h](double centre) { return std::exp(-0.5 * (h - centre) * (h - centre)); };
  return 0.45 + 0.55 * std::max(bump(8.0), bump(17.0));
}

std::vector<OccupancyBin> occupancy_bins(double mean, std::int32_t capacity) {
  constexpr std::int32_t kWidth = 5;
  const double sd = 0.2 * mean + 2.0;
  std::vector<OccupancyBin> bins;
  double total = 0.0;
  for (std::int32_t low = 0; low <= 2 * capacity; low += kWidth) {
    const std::int32_t high = low + kWidth - 1;
    const double lo = low == 0 ? -1e9 : low - 0.5;
    const double p = normal_cdf(high + 0.5, mean, sd) - normal_cdf(lo, mean, sd);
    if (p < 1e-6) continue;
    bins.push_back(OccupancyBin{low, high, p});
    total += p;
  }
  for (auto& b : bins) b.probability /= total;
  return bins;
}

}  // namespace

void check_generator_spec(const GeneratorSpec& spec) {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("generator spec: ") + what);
  };
  need(spec.routes >= 1, "routes must be >= 1");
  need(spec.stops_per_route >= 2, "stops_per_route must be >= 2");
  need(spec.buses_per_route >= 1, "buses_per_route must be >= 1");
  need(spec.trips_per_bus >= 1, "trips_per_bus must be >= 1");
  need(spec.substitutes >= 0, "substitutes must be >= 0");
  need(spec.stationing_sites >= 1, "stationing_sites must be >= 1");
  need(spec.capacity >= 1, "capacity must be >= 1");
  need(spec.demand_level >= 0.0, "demand_level must be >= 0");
  need(spec.disruptions_per_day >= 0.0, "disruptions_per_day must be >= 0");
  need(spec.area_km > 0.0 && spec.stop_spacing_km > 0.0, "area and stop spacing must be positive");
  need(spec.scheduled_speed_kmh > 0.0 && spec.fallback_speed_kmh > 0.0, "speeds must be positive");
  need(spec.dwell >= 0 && spec.layover >= 0 && spec.service_start >= 0, "times must be non-negative");
  need(spec.detour_factor >= 1.0, "detour_factor must be >= 1");
  need(spec.travel_samples >= 1, "travel_samples must be >= 1");
}

Scenario synthesize_scenario(const GeneratorSpec& spec, std::uint64_t seed) {
  check_generator_spec(spec);
  Rng rng(derive_seed(seed, SeedStream::Synthesis, 0));
  Scenario sc;
  TransitSchedule& s = sc.schedule;

  // Geography: a central garage and one meandering line of stops per route.
  const double centre = spec.area_km / 2.0;
  s.stops.push_back(Stop{"GARAGE", centre, centre, true, true});
  s.garage = StopId(0);
  std::vector<std::vector<StopId>> route_stops(static_cast<std::size_t>(spec.routes));
  for (std::int32_t r = 0; r < spec.routes; ++r) {
    double x = spec.area_km * (0.15 + 0.7 * rng.uniform01());
    double y = spec.area_km * (0.15 + 0.7 * rng.uniform01());
    double heading = 2.0 * std::numbers::pi * rng.uniform01();
    for (std::int32_t j = 0; j < spec.stops_per_route; ++j) {
      if (j > 0) {
        heading += (rng.uniform01() - 0.5) * 0.7;
        const double step = spec.stop_spacing_km * (0.7 + 0.6 * rng.uniform01());
        double nx = x + step * std::cos(heading);
        double ny = y + step * std::sin(heading);
        if (nx < 0.0 || nx > spec.area_km || ny < 0.0 || ny > spec.area_km) {
          heading += std::numbers::pi;
          nx = x + step * std::cos(heading);
          ny = y + step * std::sin(heading);
        }
        x = std::clamp(nx, 0.0, spec.area_km);
        y = std::clamp(ny, 0.0, spec.area_km);
      }
      const bool terminal = j == 0 || j == spec.stops_per_route - 1;
      const std::string id = "R" + padded(r + 1, 2) + "-S" + padded(j + 1, 2);
      route_stops[static_cast<std::size_t>(r)].emplace_back(s.stops.size());
      s.stops.push_back(Stop{id, std::round(x * 1000.0) / 1000.0, std::round(y * 1000.0) / 1000.0, terminal, terminal});
    }
  }

  // Staging sites spread across the city by farthest-point sampling.
  const std::size_t candidates = s.stops.size() - 1;
  const auto site_count = std::min<std::size_t>(static_cast<std::size_t>(spec.stationing_sites), candidates);
  std::vector<double> nearest(s.stops.size(), 1e18);
  std::size_t pick = 1 + rng.index(candidates);
  for (std::size_t k = 0; k < site_count; ++k) {
    s.stationing_sites.emplace_back(pick);
    nearest[pick] = -1.0;
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 1; i < s.stops.size(); ++i) {
      if (nearest[i] < 0.0) continue;
      const double d = std::hypot(s.stops[i].x_km - s.stops[pick].x_km, s.stops[i].y_km - s.stops[pick].y_km);
      nearest[i] = std::min(nearest[i], d);
      if (nearest[i] > best_d) {
        best_d = nearest[i];
        best = i;
      }
    }
    pick = best;
  }
  std::sort(s.stationing_sites.begin(), s.stationing_sites.end());

  sc.distances = DistanceMatrix::from_coordinates(s, spec.detour_factor);

  // Fleet and timetable. Buses on a route are spread evenly over one round
  // trip so each direction sees a regular headway.
  for (std::int32_t r = 0; r < spec.routes; ++r) {
    const auto& line = route_stops[static_cast<std::size_t>(r)];
    std::vector<Seconds> segment(line.size(), 0);
    Seconds duration = 0;
    for (std::size_t j = 1; j < line.size(); ++j) {
      const double km = sc.distances(line[j - 1], line[j]);
      segment[j] = static_cast<Seconds>(std::ceil(km / spec.scheduled_speed_kmh * 3600.0)) + spec.dwell;
      duration += segment[j];
    }
    const Seconds cycle = 2 * (duration + spec.layover);
    const std::string route = "R" + padded(r + 1, 2);
    for (std::int32_t b = 0; b < spec.buses_per_route; ++b) {
      const VehicleId vid(s.vehicles.size());
      s.vehicles.push_back(VehicleSpec{"BUS-" + padded(r + 1, 2) + "-" + padded(b + 1, 2), VehicleKind::Regular,
                                       spec.capacity});
      const Seconds offset = cycle * b / spec.buses_per_route;
      std::int32_t direction = offset < cycle / 2 ? 0 : 1;
      Seconds start = spec.service_start + (direction == 0 ? offset : offset - cycle / 2);
      for (std::int32_t k = 0; k < spec.trips_per_bus; ++k) {
        Trip trip;
        trip.id = route + "-B" + padded(b + 1, 2) + "-T" + padded(k + 1, 2);
        trip.route = route;
        trip.direction = direction;
        trip.vehicle = vid;
        Seconds t = start;
        for (std::size_t j = 0; j < line.size(); ++j) {
          const std::size_t pos = direction == 0 ? j : line.size() - 1 - j;
          if (j > 0) t += segment[direction == 0 ? pos : pos + 1];
          trip.stops.push_back(TripStop{line[pos], t});
        }
        start = t + spec.layover;
        direction = 1 - direction;
        s.trips.push_back(std::move(trip));
      }
    }
  }
  for (std::int32_t k = 0; k < spec.substitutes; ++k) {
    s.vehicles.push_back(VehicleSpec{"SUB-" + padded(k + 1, 2), VehicleKind::Substitute, spec.capacity});
  }
  s.finalize();

  // Occupancy forecasts: demand peaks mid-route and at commute hours.
  std::vector<double> service_factor(static_cast<std::size_t>(spec.routes) * 2);
  for (double& f : service_factor) f = 0.75 + 0.5 * rng.uniform01();
  sc.occupancy.bins.resize(s.trips.size());
  for (std::size_t i = 0; i < s.trips.size(); ++i) {
    const Trip& trip = s.trips[i];
    const std::size_t n = trip.stops.size();
    auto& per_stop = sc.occupancy.bins[i];
    per_stop.resize(n);
    const double route_scale =
        service_factor[static_cast<std::size_t>(trip.service.route) * 2 + static_cast<std::size_t>(trip.direction)];
    for (std::size_t j = 0; j < n; ++j) {
      if (j + 1 == n) {
        per_stop[j] = {OccupancyBin{0, 0, 1.0}};
        continue;
      }
      const double position = std::pow(std::sin(std::numbers::pi * (static_cast<double>(j) + 0.75) / n), 0.7);
      const double mean = spec.demand_level * spec.capacity * time_of_day_factor(trip.stops[j].scheduled) *
                          route_scale * position;
      per_stop[j] = occupancy_bins(mean, spec.capacity);
    }
  }

  // Disruptions: trip-level probability proportional to running time, stop
  // location from a perturbed uniform over interior stops.
  double total_duration = 0.0;
  for (const Trip& t : s.trips) total_duration += static_cast<double>(t.end() - t.start());
  sc.disruptions.trips.resize(s.trips.size());
  for (std::size_t i = 0; i < s.trips.size(); ++i) {
    const Trip& trip = s.trips[i];
    TripDisruptionModel& m = sc.disruptions.trips[i];
    m.probability = std::min(1.0, spec.disruptions_per_day * static_cast<double>(trip.end() - trip.start()) /
                                      total_duration);
    m.stop_weights.assign(trip.stops.size(), 0.0);
    const std::size_t n = trip.stops.size();
    const std::size_t first = 1;
    const std::size_t last = n > 2 ? n - 2 : n - 1;
    double total = 0.0;
    for (std::size_t j = first; j <= last; ++j) {
      m.stop_weights[j] = 0.5 + rng.uniform01();
      total += m.stop_weights[j];
    }
    for (double& w : m.stop_weights) w /= total;
  }

  // Empirical travel times around the scheduled running time.
  for (std::int32_t r = 0; r < spec.routes; ++r) {
    const auto& line = route_stops[static_cast<std::size_t>(r)];
    for (std::size_t j = 1; j < line.size(); ++j) {
      const double km = sc.distances(line[j - 1], line[j]);
      const double nominal = km / spec.scheduled_speed_kmh * 3600.0 + static_cast<double>(spec.dwell);
      for (int dir = 0; dir < 2; ++dir) {
        std::vector<Seconds> samples;
        for (std::int32_t k = 0; k < spec.travel_samples; ++k) {
          samples.push_back(std::max<Seconds>(1, std::llround(nominal * (0.85 + 0.45 * rng.uniform01()))));
        }
        if (dir == 0) {
          sc.travel.add_samples(line[j - 1], line[j], std::move(samples));
        } else {
          sc.travel.add_samples(line[j], line[j - 1], std::move(samples));
        }
      }
    }
  }
  sc.travel.fill_fallbacks(s, sc.distances, spec.fallback_speed_kmh);
  return sc;
}

}  // namespace stationing
