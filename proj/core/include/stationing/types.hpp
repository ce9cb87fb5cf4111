#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>

namespace stationing {

// Integer seconds since the start of the service day.
using Seconds = std::int64_t;

inline constexpr Seconds kNever = std::numeric_limits<Seconds>::min() / 4;

// Dense index into one of the schedule's tables. Distinct tags keep stop,
// trip and vehicle indices from being mixed up.
template <class Tag>
struct Id {
  std::int32_t value = -1;

  constexpr Id() = default;
  constexpr explicit Id(std::int32_t v) : value(v) {}
  constexpr explicit Id(std::size_t v) : value(static_cast<std::int32_t>(v)) {}

  [[nodiscard]] constexpr bool valid() const { return value >= 0; }
  [[nodiscard]] constexpr std::size_t index() const { return static_cast<std::size_t>(value); }

  friend constexpr auto operator<=>(Id, Id) = default;
};

struct StopTag;
struct TripTag;
struct VehicleTag;

using StopId = Id<StopTag>;
using TripId = Id<TripTag>;
using VehicleId = Id<VehicleTag>;

// Route + direction a trip runs and a passenger wants to ride.
struct ServiceKey {
  std::int32_t route = -1;
  std::int32_t direction = 0;

  friend constexpr auto operator<=>(ServiceKey, ServiceKey) = default;
};

enum class VehicleKind : std::uint8_t { Regular, Substitute };

enum class VehicleStatus : std::uint8_t { InTransit, Idle, OutOfService };

const char* to_string(VehicleKind kind);
const char* to_string(VehicleStatus status);

// --- actions -----------------------------------------------------------------

struct NoAction {
  friend constexpr auto operator<=>(const NoAction&, const NoAction&) = default;
};

// Send an idle substitute to a stop on a trip. If the trip's bus is broken
// down this is a takeover of all of its remaining trips; otherwise the
// substitute covers the rest of that single trip.
struct Dispatch {
  VehicleId vehicle;
  TripId trip;
  std::int32_t stop_index = 0;

  friend constexpr auto operator<=>(const Dispatch&, const Dispatch&) = default;
};

// Reposition an idle substitute to a staging site.
struct Station {
  VehicleId vehicle;
  StopId site;

  friend constexpr auto operator<=>(const Station&, const Station&) = default;
};

using Action = std::variant<NoAction, Dispatch, Station>;

// --- errors ------------------------------------------------------------------

// Bad input files, parameters or model coverage gaps.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The simulation reached a state its own rules say is impossible.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An action that is not feasible in the state it was applied to.
class InfeasibleAction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace stationing

template <class Tag>
struct std::hash<stationing::Id<Tag>> {
  std::size_t operator()(stationing::Id<Tag> id) const noexcept {
    return std::hash<std::int32_t>{}(id.value);
  }
};
