#include "stationing/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stationing/parallel.hpp"

namespace stationing {

void validate(const SearchConfig& c) {
  if (!(c.exploration > 0.0)) throw ConfigError("search: exploration constant must be > 0");
  if (c.iterations < 1) throw ConfigError("search: iterations must be >= 1");
  if (c.horizon <= 0) throw ConfigError("search: horizon must be > 0");
  if (c.chains < 1) throw ConfigError("search: chain count must be >= 1");
  if (c.workers < 1) throw ConfigError("search: workers must be >= 1");
  validate(c.weights);
}

double uct_score(double mean, std::int64_t parent_visits, std::int64_t child_visits, double exploration) {
  return mean + exploration * std::sqrt(std::log(static_cast<double>(parent_visits)) / static_cast<double>(child_visits));
}

std::size_t select_uct(std::span<const ChildStats> children, std::int64_t parent_visits, double exploration, Rng& rng) {
  std::vector<std::size_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < children.size(); ++i) {
    const double s = uct_score(children[i].mean, parent_visits, children[i].visits, exploration);
    if (s > best_score) {
      best_score = s;
      best.assign(1, i);
    } else if (s == best_score) {
      best.push_back(i);
    }
  }
  if (best.empty()) return 0;
  return best.size() == 1 ? best.front() : best[rng.index(best.size())];
}

double rollout(const Simulator& sim, WorldState state, std::optional<DecisionEpoch> epoch, Seconds until,
               const RewardWeights& weights) {
  while (epoch) {
    sim.apply_action(state, nearest_dispatch(*epoch));
    epoch = sim.advance(state, until);
  }
  return reward(state.tally, weights);
}

// --- tree -------------------------------------------------------------------------

SearchTree::SearchTree(const Simulator& sim, WorldState root, DecisionEpoch epoch, const SearchConfig& config,
                       std::uint64_t seed)
    : sim_(&sim), config_(config), seed_(seed), rng_(derive_seed(seed, 0x7ee)), until_(root.clock + config.horizon) {
  Node n;
  n.state = std::move(root);
  n.untried = shuffled(epoch.feasible_actions);
  n.epoch = std::move(epoch);
  nodes_.push_back(std::move(n));
}

std::vector<Action> SearchTree::shuffled(const std::vector<Action>& actions) {
  std::vector<Action> out = actions;
  for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[rng_.index(i)]);
  return out;
}

void SearchTree::iterate() {
  std::vector<std::int32_t> path{0};
  std::int32_t cur = 0;
  // Iterations through the same root child count 0, 1, 2, ... and the k-th
  // one under every root child sees the same traffic.
  std::int64_t lane = 0;
  double ret = 0.0;
  while (true) {
    Node& n = nodes_[static_cast<std::size_t>(cur)];
    if (!n.epoch) {
      ret = reward(n.state.tally, config_.weights);
      ++n.own_rollouts;
      n.own_sum += ret;
      break;
    }
    if (!n.untried.empty()) {
      const Action a = n.untried.back();
      n.untried.pop_back();
      Node child;
      child.parent = cur;
      child.state = n.state;
      child.state.traffic_seed = derive_seed(seed_, static_cast<std::uint64_t>(lane));
      sim_->apply_action(child.state, a);
      child.epoch = sim_->advance(child.state, until_);
      if (child.epoch) {
        child.untried = shuffled(child.epoch->feasible_actions);
        ret = rollout(*sim_, child.state, child.epoch, until_, config_.weights);
      } else {
        ret = reward(child.state.tally, config_.weights);
      }
      child.own_rollouts = 1;
      child.own_sum = ret;
      const auto idx = static_cast<std::int32_t>(nodes_.size());
      n.children.emplace_back(a, idx);
      nodes_.push_back(std::move(child));
      path.push_back(idx);
      break;
    }
    std::vector<ChildStats> stats;
    stats.reserve(n.children.size());
    for (const auto& [a, c] : n.children) {
      const Node& ch = nodes_[static_cast<std::size_t>(c)];
      stats.push_back({ch.value_sum / static_cast<double>(ch.visits), ch.visits});
    }
    const std::int32_t next = n.children[select_uct(stats, n.visits, config_.exploration, rng_)].second;
    if (cur == 0) lane = nodes_[static_cast<std::size_t>(next)].visits;
    cur = next;
    path.push_back(cur);
  }
  for (std::int32_t i : path) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    ++n.visits;
    n.value_sum += ret;
  }
}

void SearchTree::run(std::int32_t iterations) {
  for (std::int32_t i = 0; i < iterations; ++i) iterate();
}

ActionValues SearchTree::root_values() const {
  ActionValues out;
  for (const auto& [a, c] : nodes_.front().children) {
    const Node& ch = nodes_[static_cast<std::size_t>(c)];
    out.push_back({a, ch.visits, ch.value_sum / static_cast<double>(ch.visits)});
  }
  std::sort(out.begin(), out.end(), [](const ActionValue& x, const ActionValue& y) { return x.action < y.action; });
  return out;
}

bool SearchTree::consistent(double tolerance) const {
  for (const Node& n : nodes_) {
    std::int64_t visits = n.own_rollouts;
    double value = n.own_sum;
    for (const auto& [a, c] : n.children) {
      visits += nodes_[static_cast<std::size_t>(c)].visits;
      value += nodes_[static_cast<std::size_t>(c)].value_sum;
    }
    if (visits != n.visits) return false;
    if (std::abs(value - n.value_sum) > tolerance * std::max(1.0, std::abs(n.value_sum))) return false;
  }
  return true;
}

ActionValues search_tree(const Simulator& sim, const WorldState& root, const DecisionEpoch& epoch,
                         const SearchConfig& config, std::uint64_t tree_seed) {
  WorldState start = root;
  start.tally.reset(start.clock, config.weights.discount);
  SearchTree tree(sim, std::move(start), epoch, config, tree_seed);
  tree.run(config.iterations);
  return tree.root_values();
}

// --- root parallel ------------------------------------------------------------------

Decision aggregate(std::span<const ActionValues> per_chain, std::uint64_t seed) {
  std::map<Action, std::pair<double, std::int64_t>> rows;
  for (const ActionValues& tree : per_chain) {
    for (const ActionValue& v : tree) {
      auto& [sum, n] = rows[v.action];
      sum += v.mean;
      ++n;
    }
  }
  Decision d{NoAction{}, {}};
  if (rows.empty()) return d;
  std::vector<std::size_t> best;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (const auto& [a, row] : rows) {
    const double mean = row.first / static_cast<double>(row.second);
    d.values.emplace_back(a, mean);
    if (mean > best_mean) {
      best_mean = mean;
      best.assign(1, d.values.size() - 1);
    } else if (mean == best_mean) {
      best.push_back(d.values.size() - 1);
    }
  }
  Rng rng(seed);
  d.action = d.values[best.size() == 1 ? best.front() : best[rng.index(best.size())]].first;
  return d;
}

Decision decide(const Scenario& scenario, const SimConfig& sim_config, const WorldState& root,
                const DecisionEpoch& epoch, std::span<const EventChain> chains, const SearchConfig& config) {
  validate(config);
  if (chains.empty()) throw ConfigError("decide: at least one event chain is required");
  std::vector<ActionValues> values(chains.size());
  parallel_for(chains.size(), static_cast<std::size_t>(config.workers), [&](std::size_t k) {
    const Simulator sim(scenario, chains[k], sim_config);
    WorldState state = root;
    sim.rebind(state);
    values[k] = search_tree(sim, state, epoch, config, derive_seed(config.seed, SeedStream::Tree, k));
  });
  return aggregate(values, derive_seed(config.seed, SeedStream::Tree, chains.size()));
}

MctsPolicy::MctsPolicy(const Scenario& scenario, SimConfig sim_config, SearchConfig config)
    : scenario_(&scenario), sim_config_(sim_config), config_(config) {
  validate(config_);
}

Decision MctsPolicy::choose(const DecisionEpoch& epoch, const WorldState& state, const Simulator&) {
  const std::uint64_t base = derive_seed(config_.seed, SeedStream::Planning, epochs_);
  std::vector<EventChain> chains;
  chains.reserve(static_cast<std::size_t>(config_.chains));
  for (std::int32_t k = 0; k < config_.chains; ++k) {
    chains.push_back(sample_event_chain(*scenario_, derive_seed(base, static_cast<std::uint64_t>(k))));
  }
  SearchConfig c = config_;
  c.seed = derive_seed(config_.seed, SeedStream::Tree, epochs_);
  ++epochs_;
  return decide(*scenario_, sim_config_, state, epoch, chains, c);
}

}  // namespace stationing
