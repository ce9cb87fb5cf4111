#include <gtest/gtest.h>

#include <cmath>

#include "../support/toy.hpp"
#include "stationing/reward.hpp"
#include "stationing/scenario.hpp"
#include "stationing/solver.hpp"

using namespace stationing;

namespace {

// Same line as the simulator tests, with two extra staging sites 2 km and
// 9 km north of S1, and a breakdown of the only bus between S2 and S3.
struct Toy {
  Scenario sc;
  EventChain chain;
  StopId g, s1, s2, near, far;
  VehicleId bus, sub_a, sub_b;
  TripId t1, t2;
};

Toy make_toy(std::int32_t capacity = 40) {
  toy::Builder b;
  Toy t;
  t.g = b.stop("G", 0, 0, true);
  t.s1 = b.stop("S1", 1);
  t.s2 = b.stop("S2", 2);
  const auto s3 = b.stop("S3", 3);
  const auto term = b.stop("T", 4, 0, true);
  t.near = b.stop("N", 1, 2);
  t.far = b.stop("F", 1, 9);
  b.garage(t.g);
  b.site(t.s2);
  b.site(t.near);
  b.site(t.far);
  t.bus = b.bus("BUS-1", capacity);
  t.sub_a = b.substitute("SUB-A");
  t.sub_b = b.substitute("SUB-B");
  t.t1 = b.trip("T1", "R1", 0, t.bus, {{t.g, 1000}, {t.s1, 1200}, {t.s2, 1400}, {s3, 1600}, {term, 1800}});
  t.t2 = b.trip("T2", "R1", 1, t.bus, {{term, 2400}, {s3, 2600}, {t.s2, 2800}, {t.s1, 3000}, {t.g, 3200}});
  t.sc = b.build();
  t.chain = toy::empty_chain(t.sc);
  return t;
}

template <class Trigger>
std::optional<DecisionEpoch> next_epoch(const Simulator& sim, WorldState& s) {
  while (!sim.done(s)) {
    auto e = sim.step(s);
    if (e && std::holds_alternative<Trigger>(e->trigger)) return e;
  }
  return std::nullopt;
}

std::int64_t total_visits(const ActionValues& v) {
  std::int64_t n = 0;
  for (const auto& a : v) n += a.visits;
  return n;
}

Action argmax(const ActionValues& v) {
  Action best = v.front().action;
  double m = v.front().mean;
  for (const auto& a : v) {
    if (a.mean > m) {
      m = a.mean;
      best = a.action;
    }
  }
  return best;
}

}  // namespace

TEST(Reward, WorkedExamples) {
  const RewardWeights w{1.0, -1.0, 1.0};
  EXPECT_DOUBLE_EQ(reward(0, 0, 0, 0, w), 0.0);
  EXPECT_DOUBLE_EQ(reward(10, 0, 0, 100, w), 1.0);
  EXPECT_NEAR(reward(150, 50, 50, 500, w), 0.65, 1e-12);
  EXPECT_DOUBLE_EQ(reward(0, 0, 5, 0, w), 0.0);
}

TEST(Reward, Monotone) {
  const RewardWeights w{1.0, -1.0, 1.0};
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double served = static_cast<double>(rng.uniform_int(0, 500));
    const double left = static_cast<double>(rng.uniform_int(0, 500));
    const double dh = rng.uniform01() * 50;
    const double reg = 1.0 + rng.uniform01() * 500;
    const double base = reward(served, left, dh, reg, w);
    ASSERT_GE(reward(served + 1, left, dh, reg, w), base);
    ASSERT_LE(reward(served, left, dh + 1, reg, w), base);
  }
}

TEST(Reward, TallyDiscountsByElapsedSeconds) {
  RewardTally t;
  t.reset(100, 0.5);
  t.add_served(100, 4);
  t.add_served(101, 4);
  t.add_left(102, 4);
  EXPECT_DOUBLE_EQ(t.served, 6.0);
  EXPECT_DOUBLE_EQ(t.left, 1.0);
  EXPECT_DOUBLE_EQ(reward(t, RewardWeights{1.0, -1.0, 0.5}), 6.0 / 7.0);
}

TEST(Reward, WeightsAreValidated) {
  EXPECT_THROW(validate(RewardWeights{0.0, -1.0, 1.0}), ConfigError);
  EXPECT_THROW(validate(RewardWeights{1.0, 0.5, 1.0}), ConfigError);
  EXPECT_THROW(validate(RewardWeights{1.0, -1.0, 1.5}), ConfigError);
  EXPECT_NO_THROW(validate(RewardWeights{}));
}

TEST(Uct, Formula) {
  EXPECT_NEAR(uct_score(0.5, 10, 1, 1000.0), 0.5 + 1000.0 * std::sqrt(std::log(10.0)), 1e-9);
  EXPECT_NEAR(uct_score(0.5, 10, 1, 1000.0), 1517.9, 0.2);
  EXPECT_DOUBLE_EQ(uct_score(0.37, 99, 7, 0.0), 0.37);
}

TEST(Uct, ExploitationWithZeroConstant) {
  const std::vector<ChildStats> kids{{0.2, 1}, {0.9, 50}, {0.5, 2}};
  Rng rng(1);
  EXPECT_EQ(select_uct(kids, 53, 0.0, rng), 1u);
  // A large constant favours the rarely visited.
  EXPECT_EQ(select_uct(kids, 53, 1000.0, rng), 0u);
}

TEST(Uct, ExactTiesSplitEvenly) {
  const std::vector<ChildStats> kids{{0.5, 3}, {0.5, 3}};
  Rng rng(2024);
  int first = 0;
  constexpr int kTrials = 10000;
  for (int i = 0; i < kTrials; ++i) first += select_uct(kids, 6, 1000.0, rng) == 0 ? 1 : 0;
  EXPECT_NEAR(first, kTrials / 2, 3 * std::sqrt(kTrials * 0.25));
}

TEST(Aggregate, RowMeansOverChainsThatSawTheAction) {
  const Action n = NoAction{};
  const Action a = Station{VehicleId(1), StopId(2)};
  const Action b = Station{VehicleId(1), StopId(3)};
  const std::vector<ActionValues> m{
      {{n, 1, 1.0}, {a, 1, 2.0}, {b, 1, 3.0}},
      {{n, 1, 4.0}, {a, 1, 5.0}, {b, 1, 0.0}},
      {{n, 1, 1.0}, {a, 1, 2.0}},
  };
  const Decision d = aggregate(m, 1);
  EXPECT_EQ(d.action, a);
  ASSERT_EQ(d.values.size(), 3u);
  EXPECT_DOUBLE_EQ(d.values[0].second, 2.0);
  EXPECT_DOUBLE_EQ(d.values[1].second, 3.0);
  EXPECT_DOUBLE_EQ(d.values[2].second, 1.5);
}

TEST(Aggregate, EmptyGivesNoActionAndTiesAreSeeded) {
  EXPECT_EQ(aggregate({}, 1).action, Action(NoAction{}));
  const Action a = Station{VehicleId(1), StopId(2)};
  const std::vector<ActionValues> tie{{{NoAction{}, 1, 1.0}, {a, 1, 1.0}}};
  int picks = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Decision d = aggregate(tie, s);
    EXPECT_EQ(d.action, aggregate(tie, s).action);
    picks += d.action == a ? 1 : 0;
  }
  EXPECT_GT(picks, 50);
  EXPECT_LT(picks, 150);
}

TEST(Rollout, DispatchesTheNearestIdleSubstitute) {
  const Toy t = make_toy(5);
  EventChain c = t.chain;
  toy::add_group(c, t.sc, t.t1, 1, 15, 1100);
  const Simulator sim(t.sc, c);
  // A waits 2 km from S1, B 9 km.
  WorldState s = sim.initial_state(1, Placement{{t.sub_a, t.near}, {t.sub_b, t.far}});
  s.tally.reset(0, 1.0);
  const auto e = next_epoch<OverageTrigger>(sim, s);
  ASSERT_TRUE(e);
  const Action chosen = nearest_dispatch(*e);
  ASSERT_TRUE(std::holds_alternative<Dispatch>(chosen));
  EXPECT_EQ(std::get<Dispatch>(chosen).vehicle, t.sub_a);

  const RewardWeights w{1.0, -1.0, 1.0};
  auto play = [&](VehicleId v) {
    WorldState x = s;
    sim.apply_action(x, Dispatch{v, t.t1, 1});
    while (auto next = sim.advance(x, 1000000)) sim.apply_action(x, nearest_dispatch(*next));
    return reward(x.tally, w);
  };
  const double r = rollout(sim, s, e, 1000000, w);
  EXPECT_DOUBLE_EQ(r, play(t.sub_a));
  EXPECT_NE(r, play(t.sub_b));
}

TEST(Rollout, FullHorizonMatchesRunDay) {
  GeneratorSpec spec;
  spec.demand_level = 1.0;
  const Scenario sc = synthesize_scenario(spec, 3);
  const RewardWeights w{1.0, -1.0, 1.0};
  for (std::uint64_t k = 0; k < 5; ++k) {
    const EventChain c = sample_event_chain(sc, k);
    NearestDispatchPolicy p;
    const RunResult ref = run_day(sc, c, SimConfig{}, p, RunOptions{.traffic_seed = 40 + k, .weights = w});
    const Simulator sim(sc, c);
    WorldState s = sim.initial_state(40 + k);
    s.tally.reset(0, 1.0);
    const auto e = sim.advance(s, std::numeric_limits<Seconds>::max());
    ASSERT_TRUE(e);
    EXPECT_DOUBLE_EQ(rollout(sim, s, e, std::numeric_limits<Seconds>::max(), w), ref.metrics.reward);
  }
}

TEST(Rollout, EmptyHorizonReturnsTheCurrentTally) {
  const Toy t = make_toy(5);
  EventChain c = t.chain;
  toy::add_group(c, t.sc, t.t1, 1, 15, 1100);
  const Simulator sim(t.sc, c);
  WorldState s = sim.initial_state(1);
  s.tally.reset(0, 1.0);
  while (s.clock < 1200) sim.step(s);
  const RewardWeights w{1.0, -1.0, 1.0};
  EXPECT_DOUBLE_EQ(rollout(sim, s, std::nullopt, s.clock, w), reward(s.tally, w));
  WorldState end = s;
  while (!sim.done(end)) sim.step(end);
  EXPECT_DOUBLE_EQ(rollout(sim, end, std::nullopt, end.clock + 3600, w), reward(end.tally, w));
}

class BreakdownTree : public ::testing::Test {
 protected:
  void SetUp() override {
    toy::add_group(t.chain, t.sc, t.t1, 1, 6, 1100);
    toy::add_disruption(t.chain, t.sc, t.t1, 3, 1600);
    sim.emplace(t.sc, t.chain);
    root = sim->initial_state(1);
    epoch = next_epoch<BreakdownTrigger>(*sim, root);
    ASSERT_TRUE(epoch);
    ASSERT_EQ(epoch->feasible_actions.size(), 2u);
  }
  Toy t = make_toy();
  std::optional<Simulator> sim;
  WorldState root;
  std::optional<DecisionEpoch> epoch;
};

TEST_F(BreakdownTree, VisitAccounting) {
  SearchConfig cfg;
  for (std::int32_t n : {1, 200}) {
    cfg.iterations = n;
    EXPECT_EQ(total_visits(search_tree(*sim, root, *epoch, cfg, 5)), n);
  }
}

TEST_F(BreakdownTree, BackupConsistency) {
  SearchConfig cfg;
  cfg.exploration = 0.5;
  WorldState start = root;
  start.tally.reset(start.clock, cfg.weights.discount);
  SearchTree tree(*sim, start, *epoch, cfg, 9);
  tree.run(300);
  EXPECT_TRUE(tree.consistent(1e-9));
  EXPECT_EQ(tree.node(0).visits, 300);
  EXPECT_GT(tree.size(), 2u);
}

TEST_F(BreakdownTree, TakeoverBeatsWaiting) {
  SearchConfig cfg;
  cfg.iterations = 50;
  const ActionValues v = search_tree(*sim, root, *epoch, cfg, 1);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(argmax(v), (Action(Dispatch{t.sub_a, t.t1, 2})));
  EXPECT_GT(v[1].mean, v[0].mean);
}

TEST_F(BreakdownTree, SingleActionEpoch) {
  SearchConfig cfg;
  cfg.iterations = 30;
  // Ends before the next periodic review, so every iteration sees the same
  // leaf.
  cfg.horizon = 200;
  DecisionEpoch only = *epoch;
  only.feasible_actions = {NoAction{}};
  const ActionValues v = search_tree(*sim, root, only, cfg, 1);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].visits, 30);
  WorldState x = root;
  x.tally.reset(x.clock, cfg.weights.discount);
  ASSERT_FALSE(sim->advance(x, root.clock + cfg.horizon));
  EXPECT_NEAR(v[0].mean, reward(x.tally, cfg.weights), 1e-12);
}

TEST_F(BreakdownTree, DecideWithOneChainMatchesTheTree) {
  SearchConfig cfg;
  cfg.iterations = 40;
  cfg.seed = 3;
  const std::vector<EventChain> one{t.chain};
  const Decision d = decide(t.sc, SimConfig{}, root, *epoch, one, cfg);
  const ActionValues v = search_tree(*sim, root, *epoch, cfg, derive_seed(cfg.seed, SeedStream::Tree, 0));
  EXPECT_EQ(d.action, argmax(v));
  ASSERT_EQ(d.values.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_DOUBLE_EQ(d.values[i].second, v[i].mean);
}

TEST_F(BreakdownTree, IdenticalChainsAgreeWithOne) {
  SearchConfig cfg;
  cfg.iterations = 40;
  const std::vector<EventChain> one{t.chain};
  const std::vector<EventChain> many(5, t.chain);
  EXPECT_EQ(decide(t.sc, SimConfig{}, root, *epoch, one, cfg).action,
            decide(t.sc, SimConfig{}, root, *epoch, many, cfg).action);
}

TEST(Decide, WorkerCountDoesNotChangeResults) {
  GeneratorSpec spec;
  spec.demand_level = 1.0;
  spec.disruptions_per_day = 6;
  const Scenario sc = synthesize_scenario(spec, 11);
  const EventChain c = sample_event_chain(sc, 1);
  const Simulator sim(sc, c);
  WorldState s = sim.initial_state(2);
  std::optional<DecisionEpoch> e;
  for (int k = 0; k < 4; ++k) {
    e = sim.advance(s, std::numeric_limits<Seconds>::max());
    ASSERT_TRUE(e);
  }
  std::vector<EventChain> chains;
  for (std::uint64_t k = 0; k < 6; ++k) chains.push_back(sample_event_chain(sc, 100 + k));
  SearchConfig cfg;
  cfg.iterations = 30;
  cfg.seed = 8;
  cfg.workers = 1;
  const Decision a = decide(sc, SimConfig{}, s, *e, chains, cfg);
  cfg.workers = 4;
  const Decision b = decide(sc, SimConfig{}, s, *e, chains, cfg);
  EXPECT_EQ(a.action, b.action);
  ASSERT_EQ(a.values.size(), b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    EXPECT_EQ(a.values[i].first, b.values[i].first);
    EXPECT_EQ(a.values[i].second, b.values[i].second);
  }
}

TEST(Decide, AnytimeAndValidated) {
  const Toy t = make_toy();
  EventChain c = t.chain;
  toy::add_disruption(c, t.sc, t.t1, 2, 1400);
  const Simulator sim(t.sc, c);
  WorldState s = sim.initial_state(1);
  const auto e = next_epoch<BreakdownTrigger>(sim, s);
  ASSERT_TRUE(e);
  SearchConfig cfg;
  cfg.iterations = 1;
  const std::vector<EventChain> chains{c, c};
  EXPECT_NO_THROW(decide(t.sc, SimConfig{}, s, *e, chains, cfg));
  EXPECT_THROW(decide(t.sc, SimConfig{}, s, *e, {}, cfg), ConfigError);
  cfg.exploration = 0.0;
  EXPECT_THROW(decide(t.sc, SimConfig{}, s, *e, chains, cfg), ConfigError);
}
