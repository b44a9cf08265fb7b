#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pursuit/vec2.hpp"

namespace pursuit {

enum class EvaderStrategy { kFlee, kStatic, kScripted, kExternal, kRandom };

std::string_view to_string(EvaderStrategy strategy);
std::optional<EvaderStrategy> parse_evader_strategy(std::string_view name);

struct EvaderSpec {
  double max_speed = 0.0;  // V_e
  double flee_gain = 140.0;
  EvaderStrategy strategy = EvaderStrategy::kFlee;
  // Keep the "+ p_e" term of the flee law. Dropping it makes the law
  // independent of the world origin.
  bool origin_term = true;
  std::vector<Vec2> waypoints;   // scripted strategy
  double retarget_interval = 1.0;  // random strategy, seconds
  std::uint64_t seed = 0;          // random strategy

  friend bool operator==(const EvaderSpec &, const EvaderSpec &) = default;
};

// Weighted flee law. Returns nothing when the direction argument is zero so
// the caller can hold its previous heading.
std::optional<Vec2> flee_velocity(const Vec2 &evader,
                                  std::span<const Vec2> pursuers,
                                  const EvaderSpec &spec);

// Human/remote steering command.
struct SteerCommand {
  enum class Kind { kHeading, kStop };
  Kind kind = Kind::kHeading;
  double heading = 0.0;

  static SteerCommand towards(double heading) {
    return {Kind::kHeading, heading};
  }
  static SteerCommand stop() { return {Kind::kStop, 0.0}; }
  friend bool operator==(const SteerCommand &, const SteerCommand &) = default;
};

// Zero-order hold over external commands: no command yet means zero
// velocity, otherwise the last command stays in force.
Vec2 external_command(const std::optional<SteerCommand> &last,
                      double max_speed);

// Stateful evader policy driven once per engine tick. Copyable so a
// simulation can be snapshotted.
class EvaderController {
 public:
  explicit EvaderController(EvaderSpec spec);

  // Velocity for the tick starting at time `t`.
  Vec2 velocity(double t, double dt, const Vec2 &evader,
                std::span<const Vec2> pursuers);

  void command(const SteerCommand &cmd) { last_command_ = cmd; }
  const std::optional<SteerCommand> &last_command() const {
    return last_command_;
  }
  const EvaderSpec &spec() const { return spec_; }

 private:
  Vec2 scripted(double dt, const Vec2 &evader);
  Vec2 random_heading(double t);

  EvaderSpec spec_;
  Vec2 last_velocity_;
  std::size_t waypoint_ = 0;
  std::optional<SteerCommand> last_command_;
  std::uint64_t rng_state_ = 0;
  long heading_epoch_ = -1;
  double heading_ = 0.0;
};

}  // namespace pursuit
