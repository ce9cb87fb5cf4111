#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stationing/policy.hpp"

namespace stationing {

struct StationingPlan {
  std::string label = "custom";
  Placement assignments;
};

StationingPlan garage_plan(const TransitSchedule& schedule);

// Every substitute assigned exactly once, every target a stationing site.
std::vector<std::string> plan_violations(const StationingPlan& plan, const TransitSchedule& schedule);

// JSON object mapping substitute id to site id.
StationingPlan read_plan(std::istream& in, const TransitSchedule& schedule, std::string label = "AGENCY");
StationingPlan load_plan(const std::filesystem::path& path, const TransitSchedule& schedule,
                         std::string label = "AGENCY");
void write_plan(std::ostream& out, const StationingPlan& plan, const TransitSchedule& schedule);

// Dispatch-only rule of thumb: breakdowns always get the nearest idle
// substitute, overages only when at least `threshold_percent` of the
// triggering bus's capacity (rounded up) was left behind, and periodic
// epochs never move anything.
class GreedyPolicy final : public Policy {
 public:
  explicit GreedyPolicy(std::int32_t threshold_percent = 5) : threshold_percent_(threshold_percent) {}
  [[nodiscard]] std::string name() const override { return "greedy"; }
  Decision choose(const DecisionEpoch& epoch, const WorldState& state, const Simulator& sim) override;

  [[nodiscard]] static std::int32_t threshold(std::int32_t capacity, std::int32_t percent) {
    return (capacity * percent + 99) / 100;
  }

 private:
  std::int32_t threshold_percent_;
};

struct AnnealingParams {
  double initial_temperature = 1.0;
  double cooling = 0.95;
  std::int32_t iterations = 200;
};

void validate(const AnnealingParams& params);

struct AnnealingTrace {
  std::vector<double> current;
  std::vector<double> best;
  std::int32_t evaluations = 0;
};

// Mean full-day reward of the greedy policy starting from `plan`, over
// `chains`. Chain k always uses the same traffic stream.
double plan_objective(const Scenario& scenario, const SimConfig& config, std::span<const EventChain> chains,
                      const StationingPlan& plan, const RewardWeights& weights, std::uint64_t seed);

// Simulated annealing over substitute-to-site assignments, starting from
// the garage plan. Returns the best plan seen.
StationingPlan search_stationing(const Scenario& scenario, const SimConfig& config, std::span<const EventChain> chains,
                                 const AnnealingParams& params, const RewardWeights& weights, std::uint64_t seed,
                                 AnnealingTrace* trace = nullptr);

enum class PlanKind { Garage, Agency, Search };

PlanKind parse_plan_kind(const std::string& text);

struct PlanInputs {
  std::filesystem::path agency_file;
  std::span<const EventChain> tuning_chains;
  AnnealingParams annealing;
  SimConfig sim_config;
  RewardWeights weights{1.0, -1.0, 1.0};
  std::uint64_t seed = 0;
};

StationingPlan make_plan(PlanKind kind, const Scenario& scenario, const PlanInputs& inputs);

}  // namespace stationing
