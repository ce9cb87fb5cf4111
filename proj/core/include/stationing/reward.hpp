#pragma once

#include "stationing/world_state.hpp"

namespace stationing {

struct RewardWeights {
  double alpha = 1.0;
  double beta = -1.0;
  // Per simulated second.
  double discount = 0.99997;
};

// Throws ConfigError unless alpha > 0, beta < 0 and 0 < discount <= 1.
void validate(const RewardWeights& weights);

// alpha * served / (served + left) + beta * deadhead_km / regular_km.
// A term whose normalizer is zero contributes nothing.
double reward(double served, double left, double deadhead_km, double regular_km, const RewardWeights& weights);
double reward(const RewardTally& tally, const RewardWeights& weights);

}  // namespace stationing
