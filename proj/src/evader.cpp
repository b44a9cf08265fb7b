#include "pursuit/evader.hpp"

#include <cmath>

#include "pursuit/geometry.hpp"

namespace pursuit {

namespace {

// splitmix64; portable so random evaders replay identically everywhere.
std::uint64_t next_random(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

std::string_view to_string(EvaderStrategy strategy) {
  switch (strategy) {
    case EvaderStrategy::kFlee: return "flee";
    case EvaderStrategy::kStatic: return "static";
    case EvaderStrategy::kScripted: return "scripted";
    case EvaderStrategy::kExternal: return "external";
    case EvaderStrategy::kRandom: return "random";
  }
  return "unknown";
}

std::optional<EvaderStrategy> parse_evader_strategy(std::string_view name) {
  for (auto s : {EvaderStrategy::kFlee, EvaderStrategy::kStatic,
                 EvaderStrategy::kScripted, EvaderStrategy::kExternal,
                 EvaderStrategy::kRandom}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<Vec2> flee_velocity(const Vec2 &evader,
                                  std::span<const Vec2> pursuers,
                                  const EvaderSpec &spec) {
  Vec2 arg;
  for (const Vec2 &p : pursuers) {
    const Vec2 away = evader - p;
    arg += (spec.flee_gain / norm(away)) * away;
  }
  if (spec.origin_term) arg += evader;
  const double len = norm(arg);
  if (len == 0.0) return std::nullopt;
  return (spec.max_speed / len) * arg;
}

Vec2 external_command(const std::optional<SteerCommand> &last,
                      double max_speed) {
  if (!last || last->kind == SteerCommand::Kind::kStop) return {};
  return max_speed * unit_from_angle(last->heading);
}

EvaderController::EvaderController(EvaderSpec spec)
    : spec_(std::move(spec)), rng_state_(spec_.seed) {}

Vec2 EvaderController::velocity(double t, double dt, const Vec2 &evader,
                                std::span<const Vec2> pursuers) {
  Vec2 v;
  switch (spec_.strategy) {
    case EvaderStrategy::kFlee:
      v = flee_velocity(evader, pursuers, spec_).value_or(last_velocity_);
      break;
    case EvaderStrategy::kStatic:
      break;
    case EvaderStrategy::kScripted:
      v = scripted(dt, evader);
      break;
    case EvaderStrategy::kExternal:
      v = external_command(last_command_, spec_.max_speed);
      break;
    case EvaderStrategy::kRandom:
      v = random_heading(t);
      break;
  }
  last_velocity_ = v;
  return v;
}

Vec2 EvaderController::scripted(double dt, const Vec2 &evader) {
  const double step = spec_.max_speed * dt;
  while (waypoint_ < spec_.waypoints.size()) {
    const Vec2 to_target = spec_.waypoints[waypoint_] - evader;
    const double len = norm(to_target);
    if (len > step) return (spec_.max_speed / len) * to_target;
    // Land exactly on the waypoint this tick, then move on.
    ++waypoint_;
    if (len > 0.0) return to_target / dt;
  }
  return {};
}

Vec2 EvaderController::random_heading(double t) {
  const double interval =
      spec_.retarget_interval > 0.0 ? spec_.retarget_interval : 1.0;
  // Small bias keeps tick times like 0.99999999 in the right epoch.
  const long epoch = static_cast<long>(std::floor(t / interval + 1e-9));
  while (heading_epoch_ < epoch) {
    heading_ = kTwoPi * unit_interval(next_random(rng_state_));
    ++heading_epoch_;
  }
  return spec_.max_speed * unit_from_angle(heading_);
}

}  // namespace pursuit
