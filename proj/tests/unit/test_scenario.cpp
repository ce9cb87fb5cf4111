#include <gtest/gtest.h>

#include <filesystem>
#include <numeric>

#include "../support/toy.hpp"
#include "stationing/scenario.hpp"

using namespace stationing;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("stationing_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

toy::Builder line_builder() {
  toy::Builder b;
  const auto g = b.stop("G", 0, 0, true);
  const auto s1 = b.stop("S1", 1);
  const auto s2 = b.stop("S2", 2);
  const auto t = b.stop("T", 3, 0, true);
  b.garage(g);
  b.site(s2);
  const auto bus = b.bus("BUS-1");
  b.substitute("SUB-1");
  b.trip("T1", "R1", 0, bus, {{g, 1000}, {s1, 1200}, {s2, 1400}, {t, 1600}});
  return b;
}

}  // namespace

TEST(Flows, WorkedExample) {
  const std::vector<std::int32_t> trace{5, 2, 6};
  const Flows f = derive_flows(trace);
  EXPECT_EQ(f.boardings, (std::vector<std::int32_t>{5, 0, 4}));
  EXPECT_EQ(f.alightings, (std::vector<std::int32_t>{0, 3, 6}));
}

TEST(Flows, ConserveLoadOnRandomTraces) {
  Rng rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<std::int32_t> trace(static_cast<std::size_t>(rng.uniform_int(1, 12)));
    for (auto& x : trace) x = static_cast<std::int32_t>(rng.uniform_int(0, 60));
    const Flows f = derive_flows(trace);
    std::int32_t load = 0;
    for (std::size_t j = 0; j < trace.size(); ++j) {
      load += f.boardings[j] - f.alightings[j];
      if (j + 1 < trace.size()) ASSERT_EQ(load, trace[j]);
      ASSERT_TRUE(f.boardings[j] == 0 || f.alightings[j] == 0 || j + 1 == trace.size());
    }
    ASSERT_EQ(load, 0);
  }
}

TEST(Chains, EmptyBinsGiveEmptyDays) {
  const Scenario sc = line_builder().build();
  const EventChain c = sample_event_chain(sc, 17);
  EXPECT_TRUE(c.arrivals.empty());
  EXPECT_TRUE(c.disruptions.empty());
  EXPECT_EQ(c.disruption_stop, std::vector<std::int32_t>{-1});
}

TEST(Chains, CertainDisruptionLandsOnTheOnlyWeightedStop) {
  Scenario sc = line_builder().build();
  sc.disruptions.trips[0].probability = 1.0;
  sc.disruptions.trips[0].stop_weights = {0.0, 0.0, 1.0, 0.0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const EventChain c = sample_event_chain(sc, seed);
    ASSERT_EQ(c.disruptions.size(), 1u);
    EXPECT_EQ(c.disruptions[0].stop_index, 2);
    EXPECT_EQ(c.disruptions[0].time, 1400);
    EXPECT_EQ(c.disruption_stop[0], 2);
  }
}

TEST(Chains, PinnedOccupancyMaterializesBoardings) {
  Scenario sc = line_builder().build();
  toy::pin_occupancy(sc, TripId(0), {10, 14, 4, 0});
  const EventChain c = sample_event_chain(sc, 3);
  EXPECT_EQ(c.occupancy[0], (std::vector<std::int32_t>{10, 14, 4, 0}));
  ASSERT_EQ(c.arrivals.size(), 2u);
  EXPECT_EQ(c.arrivals[0].count + c.arrivals[1].count, 14);
  for (const auto& a : c.arrivals) {
    const Seconds due = sc.schedule.trips[0].stops[static_cast<std::size_t>(a.stop_index)].scheduled;
    EXPECT_LE(a.time, due);
    EXPECT_GE(a.time, due - kArrivalWindow);
  }
  EXPECT_DOUBLE_EQ(c.alight_fraction(TripId(0), 2), 10.0 / 14.0);
  EXPECT_DOUBLE_EQ(c.alight_fraction(TripId(0), 0), 0.0);
}

TEST(Chains, SameSeedSameChain) {
  const Scenario sc = synthesize_scenario(GeneratorSpec{}, 4);
  const EventChain a = sample_event_chain(sc, 99);
  const EventChain b = sample_event_chain(sc, 99);
  const EventChain c = sample_event_chain(sc, 100);
  EXPECT_EQ(a.occupancy, b.occupancy);
  EXPECT_EQ(a.disruptions, b.disruptions);
  ASSERT_EQ(a.arrivals.size(), b.arrivals.size());
  for (std::size_t i = 0; i < a.arrivals.size(); ++i) EXPECT_EQ(a.arrivals[i].time, b.arrivals[i].time);
  EXPECT_NE(a.occupancy, c.occupancy);
  EXPECT_TRUE(std::is_sorted(a.arrivals.begin(), a.arrivals.end(),
                             [](const auto& x, const auto& y) { return x.time < y.time; }));
}

TEST(Models, ChecksRejectMalformedModels) {
  Scenario sc = line_builder().build();
  OccupancyModel occ = sc.occupancy;
  occ.bins[0][1] = {OccupancyBin{0, 5, 0.5}, OccupancyBin{3, 9, 0.5}};
  EXPECT_THROW(check_occupancy_model(occ, sc.schedule), ConfigError);
  occ = sc.occupancy;
  occ.bins[0][1] = {OccupancyBin{0, 5, 0.4}};
  EXPECT_THROW(check_occupancy_model(occ, sc.schedule), ConfigError);
  occ = sc.occupancy;
  occ.bins[0].pop_back();
  EXPECT_THROW(check_occupancy_model(occ, sc.schedule), ConfigError);

  DisruptionModel dm = sc.disruptions;
  dm.trips[0].probability = 1.5;
  EXPECT_THROW(check_disruption_model(dm, sc.schedule), ConfigError);
  dm = sc.disruptions;
  dm.trips[0].stop_weights = {1.0, 1.0, 0.0, 0.0};
  EXPECT_THROW(check_disruption_model(dm, sc.schedule), ConfigError);

  TravelTimeModel tm;
  EXPECT_THROW(check_travel_model(tm, sc.schedule), ConfigError);
  tm.fill_fallbacks(sc.schedule, sc.distances, 30.0);
  EXPECT_NO_THROW(check_travel_model(tm, sc.schedule));
  EXPECT_EQ(*tm.fallback(StopId(0), StopId(1)), 120);
  EXPECT_THROW(tm.add_samples(StopId(0), StopId(1), {0}), ConfigError);
}

TEST(Synth, ProducesAConsistentBundle) {
  GeneratorSpec spec;
  spec.routes = 3;
  const Scenario sc = synthesize_scenario(spec, 8);
  EXPECT_TRUE(validate_schedule(sc.schedule).empty());
  EXPECT_NO_THROW(check_occupancy_model(sc.occupancy, sc.schedule));
  EXPECT_NO_THROW(check_disruption_model(sc.disruptions, sc.schedule));
  EXPECT_NO_THROW(check_travel_model(sc.travel, sc.schedule));
  const MatrixReport r = inspect_matrix(sc.distances);
  EXPECT_TRUE(r.symmetric && r.zero_diagonal && r.positive_off_diagonal);
  EXPECT_LE(r.worst_triangle_excess, 0.01);
  EXPECT_EQ(sc.schedule.substitutes().size(), 5u);
  EXPECT_EQ(sc.schedule.routes().size(), 3u);
  EXPECT_EQ(sc.schedule.trips.size(), 3u * 2u * 8u);
  double expected = 0.0;
  for (const auto& t : sc.disruptions.trips) expected += t.probability;
  EXPECT_NEAR(expected, 3.0, 1e-9);
}

TEST(Synth, RejectsImpossibleSpecs) {
  GeneratorSpec spec;
  spec.routes = 0;
  EXPECT_THROW(synthesize_scenario(spec, 1), ConfigError);
  spec = {};
  spec.demand_level = -1;
  EXPECT_THROW(synthesize_scenario(spec, 1), ConfigError);
  spec = {};
  spec.capacity = 0;
  EXPECT_THROW(synthesize_scenario(spec, 1), ConfigError);
}

TEST(ScenarioFiles, RoundTripPreservesSampling) {
  const Scenario sc = synthesize_scenario(GeneratorSpec{}, 21);
  const auto dir = scratch("roundtrip");
  save_scenario(dir, sc);
  const Scenario back = load_scenario(dir);
  EXPECT_EQ(back.schedule.trips.size(), sc.schedule.trips.size());
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const EventChain a = sample_event_chain(sc, seed);
    const EventChain b = sample_event_chain(back, seed);
    EXPECT_EQ(a.occupancy, b.occupancy);
    EXPECT_EQ(a.disruptions, b.disruptions);
  }
  for (std::size_t i = 0; i < sc.distances.size(); ++i) {
    for (std::size_t j = 0; j < sc.distances.size(); ++j) {
      ASSERT_DOUBLE_EQ(back.distances(StopId(i), StopId(j)), sc.distances(StopId(i), StopId(j)));
    }
  }
  std::filesystem::remove_all(dir);
}

TEST(ScenarioFiles, MissingFileIsAConfigError) {
  const Scenario sc = synthesize_scenario(GeneratorSpec{}, 21);
  const auto dir = scratch("missing");
  save_scenario(dir, sc);
  std::filesystem::remove(dir / "occupancy.json");
  EXPECT_THROW(load_scenario(dir), ConfigError);
  std::filesystem::remove_all(dir);
}
