#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stationing/policy.hpp"

namespace stationing {

struct SearchConfig {
  double exploration = 1000.0;
  std::int32_t iterations = 200;
  Seconds horizon = 3600;
  std::int32_t chains = 20;
  RewardWeights weights;
  std::uint64_t seed = 0;
  // Threads used to build the per-chain trees.
  std::int32_t workers = 1;
};

void validate(const SearchConfig& config);

// mean + exploration * sqrt(ln(parent_visits) / child_visits).
double uct_score(double mean, std::int64_t parent_visits, std::int64_t child_visits, double exploration);

// Index of the highest-scoring child; exact ties are broken uniformly with
// `rng`. Children with zero visits must not be passed.
struct ChildStats {
  double mean = 0.0;
  std::int64_t visits = 0;
};
std::size_t select_uct(std::span<const ChildStats> children, std::int64_t parent_visits, double exploration, Rng& rng);

struct ActionValue {
  Action action;
  std::int64_t visits = 0;
  double mean = 0.0;
};

// Root statistics of one tree, sorted by action.
using ActionValues = std::vector<ActionValue>;

// Plays the default dispatch rule from `state` (at `epoch`, if one is
// pending) until `until` or the end of the day and returns the reward of the
// state's tally.
double rollout(const Simulator& sim, WorldState state, std::optional<DecisionEpoch> epoch, Seconds until,
               const RewardWeights& weights);

// UCT search over one event chain. `root` must already be bound to the
// simulator's chain and have its tally reset to the decision time.
class SearchTree {
 public:
  struct Node {
    WorldState state;
    std::optional<DecisionEpoch> epoch;
    std::vector<Action> untried;
    std::vector<std::pair<Action, std::int32_t>> children;
    std::int32_t parent = -1;
    std::int64_t visits = 0;
    double value_sum = 0.0;
    // Returns of rollouts that ended at this node.
    std::int64_t own_rollouts = 0;
    double own_sum = 0.0;
  };

  SearchTree(const Simulator& sim, WorldState root, DecisionEpoch epoch, const SearchConfig& config,
             std::uint64_t seed);

  void iterate();
  void run(std::int32_t iterations);

  [[nodiscard]] ActionValues root_values() const;
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] const Node& node(std::size_t i) const { return nodes_[i]; }

  // Every node's visits equal its children's visits plus its own rollouts,
  // and likewise for values within `tolerance`.
  [[nodiscard]] bool consistent(double tolerance) const;

 private:
  std::vector<Action> shuffled(const std::vector<Action>& actions);

  const Simulator* sim_;
  SearchConfig config_;
  std::uint64_t seed_;
  Rng rng_;
  Seconds until_;
  std::vector<Node> nodes_;
};

ActionValues search_tree(const Simulator& sim, const WorldState& root, const DecisionEpoch& epoch,
                         const SearchConfig& config, std::uint64_t tree_seed);

// Mean value of each action over the trees that evaluated it, and the
// argmax with seeded tie-breaking. An empty input yields NoAction.
Decision aggregate(std::span<const ActionValues> per_chain, std::uint64_t seed);

// Root-parallel MCTS: one tree per chain, aggregated by mean value.
Decision decide(const Scenario& scenario, const SimConfig& sim_config, const WorldState& root,
                const DecisionEpoch& epoch, std::span<const EventChain> chains, const SearchConfig& config);

// Samples fresh planning chains at every epoch and calls decide.
class MctsPolicy final : public Policy {
 public:
  MctsPolicy(const Scenario& scenario, SimConfig sim_config, SearchConfig config);
  [[nodiscard]] std::string name() const override { return "mcts"; }
  Decision choose(const DecisionEpoch& epoch, const WorldState& state, const Simulator& sim) override;

 private:
  const Scenario* scenario_;
  SimConfig sim_config_;
  SearchConfig config_;
  std::uint64_t epochs_ = 0;
};

}  // namespace stationing
