#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace stationing {

// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

// Purpose-tagged seed families. Seeds drawn from different streams never
// collide for the same master seed, which is how tuning and evaluation
// chains are kept disjoint.
enum class SeedStream : std::uint8_t {
  Evaluation = 1,
  Tuning = 2,
  Planning = 3,
  Traffic = 4,
  Tree = 5,
  Annealing = 6,
  Occupancy = 7,
  Disruption = 8,
  Synthesis = 9,
  Policy = 10,
};

std::uint64_t derive_seed(std::uint64_t master, SeedStream stream, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

// Small, copyable generator with platform-independent output. Satisfies
// UniformRandomBitGenerator, but the member samplers below should be used
// wherever results are persisted, since <random> distributions differ
// between standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform integer in [lo, hi]; requires lo <= hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Uniform index in [0, n); requires n > 0.
  std::size_t index(std::size_t n);
  // Uniform double in [0, 1).
  double uniform01();
  bool bernoulli(double p);
  // Index drawn proportionally to non-negative weights. Returns weights.size()
  // if every weight is zero.
  std::size_t categorical(std::span<const double> weights);

  [[nodiscard]] std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace stationing
