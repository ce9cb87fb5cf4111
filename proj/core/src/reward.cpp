#include "stationing/reward.hpp"

namespace stationing {

void validate(const RewardWeights& w) {
  if (!(w.alpha > 0.0)) throw ConfigError("reward weights: alpha must be > 0");
  if (!(w.beta < 0.0)) throw ConfigError("reward weights: beta must be < 0");
  if (!(w.discount > 0.0 && w.discount <= 1.0)) throw ConfigError("reward weights: discount must be in (0, 1]");
}

double reward(double served, double left, double deadhead_km, double regular_km, const RewardWeights& w) {
  const double passengers = served + left;
  const double service_term = passengers > 0.0 ? served / passengers : 0.0;
  const double deadhead_term = regular_km > 0.0 ? deadhead_km / regular_km : 0.0;
  return w.alpha * service_term + w.beta * deadhead_term;
}

double reward(const RewardTally& t, const RewardWeights& w) {
  return reward(t.served, t.left, t.deadhead_km, t.regular_km, w);
}

}  // namespace stationing
