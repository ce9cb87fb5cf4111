#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "stationing/reward.hpp"
#include "stationing/simulator.hpp"

namespace stationing {

struct Decision {
  Action action;
  // Estimated value per candidate, when the policy computes one.
  std::vector<std::pair<Action, double>> values;
};

class Policy {
 public:
  virtual ~Policy() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  virtual Decision choose(const DecisionEpoch& epoch, const WorldState& state, const Simulator& sim) = 0;
};

// Dispatch the nearest idle substitute to the stop that raised the epoch;
// at periodic epochs take over a pending breakdown if there is one,
// otherwise stay put.
Action nearest_dispatch(const DecisionEpoch& epoch);

class NearestDispatchPolicy final : public Policy {
 public:
  [[nodiscard]] std::string name() const override { return "nearest"; }
  Decision choose(const DecisionEpoch& epoch, const WorldState&, const Simulator&) override {
    return {nearest_dispatch(epoch), {}};
  }
};

class IdlePolicy final : public Policy {
 public:
  [[nodiscard]] std::string name() const override { return "idle"; }
  Decision choose(const DecisionEpoch&, const WorldState&, const Simulator&) override { return {NoAction{}, {}}; }
};

// Uniform over the feasible set.
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}
  [[nodiscard]] std::string name() const override { return "random"; }
  Decision choose(const DecisionEpoch& epoch, const WorldState&, const Simulator&) override {
    return {epoch.feasible_actions[rng_.index(epoch.feasible_actions.size())], {}};
  }

 private:
  Rng rng_;
};

struct DecisionRecord {
  Seconds time = 0;
  EpochTrigger trigger;
  std::size_t candidates = 0;
  Action action;
  std::vector<std::pair<Action, double>> values;
  double latency_ms = 0.0;
};

struct RunOptions {
  std::uint64_t traffic_seed = 0;
  Placement placement;
  bool keep_log = false;
  // Check conservation after every event.
  bool audit = false;
  RewardWeights weights{1.0, -1.0, 1.0};
};

struct RunMetrics {
  std::int64_t generated = 0;
  std::int64_t served = 0;
  std::int64_t left = 0;
  std::int64_t delivered = 0;
  // Per substitute, in schedule.substitutes() order.
  std::vector<double> deadhead_km;
  double total_deadhead_km = 0.0;
  double regular_km = 0.0;
  std::int64_t epochs = 0;
  std::int64_t dispatches = 0;
  std::int64_t stationings = 0;
  std::int64_t events = 0;
  double reward = 0.0;
  double wall_ms = 0.0;
  std::vector<double> latency_ms;
};

struct RunResult {
  RunMetrics metrics;
  EventLog log;
  std::vector<DecisionRecord> decisions;
  // Audit findings; empty when the run stayed consistent.
  std::vector<std::string> violations;
};

// Simulates one full day on `chain`, asking `policy` at every epoch.
RunResult run_day(const Scenario& scenario, const EventChain& chain, const SimConfig& config, Policy& policy,
                  const RunOptions& options = {});

}  // namespace stationing
