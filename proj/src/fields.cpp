#include "pursuit/fields.hpp"

#include <cmath>
#include <sstream>

#include "pursuit/error.hpp"

namespace pursuit {

namespace {

// ((d^2 - (2 inner^2 - outer^2)) / (d^2 - outer^2))^2 - 1 where `inner` is
// the radius at which the potential vanishes and `outer` the blow-up radius.
PotentialSample rational_barrier(double d, double zero_radius,
                                 double blowup_radius) {
  const double d2 = d * d;
  const double z2 = zero_radius * zero_radius;
  const double b2 = blowup_radius * blowup_radius;
  const double denom = d2 - b2;
  // Grouped so f is exactly -1 at d = zero_radius.
  const double f = ((d2 - z2) + (b2 - z2)) / denom;
  const double df = 4.0 * d * (z2 - b2) / (denom * denom);
  PotentialSample out{f * f - 1.0, 2.0 * f * df};
  if (!std::isfinite(out.value) || !std::isfinite(out.gradient)) {
    std::ostringstream msg;
    msg << "potential overflow at distance " << d << " (blow-up radius "
        << blowup_radius << ")";
    throw Error(ErrorKind::kPotentialOverflow, msg.str());
  }
  return out;
}

double signum(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_positive_distance(double d) {
  if (!(d > 0.0)) {
    throw Error(ErrorKind::kDegeneratePosition,
                "potential evaluated at zero distance");
  }
}

}  // namespace

PotentialSample maintenance_potential(double d, const FieldParams &params) {
  require_positive_distance(d);
  if (d < params.r_c || d >= params.r_f) return {};
  return rational_barrier(d, params.r_c, params.r_f);
}

PotentialSample collision_potential(double d, const FieldParams &params) {
  require_positive_distance(d);
  if (d <= params.r_o || d > params.r_b) return {};
  return rational_barrier(d, params.r_b, params.r_o);
}

void classify_bands(int self, std::span<const Vec2> positions,
                    const FieldParams &params, NeighborSets &sets) {
  sets.d_m.clear();
  sets.d_o.clear();
  for (int j : sets.polygon) {
    const double d = distance(positions[self], positions[j]);
    if (d >= params.r_c && d < params.r_f) sets.d_m.push_back(j);
  }
  for (int j : sets.omega) {
    const double d = distance(positions[self], positions[j]);
    if (d > params.r_o && d <= params.r_b) sets.d_o.push_back(j);
  }
}

Vec2 potential_descent(int self, std::span<const Vec2> positions,
                       const NeighborSets &sets, const FieldParams &params) {
  const Vec2 &p = positions[self];
  Vec2 s;
  for (int j : sets.polygon) {
    const Vec2 diff = p - positions[j];
    const double d = norm(diff);
    const PotentialSample q = maintenance_potential(d, params);
    s -= (q.gradient / d) * diff;
  }
  Vec2 w;
  for (int j : sets.omega) {
    const Vec2 diff = p - positions[j];
    const double d = norm(diff);
    if (d <= params.r_o) {
      std::ostringstream msg;
      msg << "pursuers " << self << " and " << j << " at distance " << d
          << " breached the collision radius " << params.r_o;
      throw Error(ErrorKind::kPotentialOverflow, msg.str());
    }
    const PotentialSample u = collision_potential(d, params);
    w -= (u.gradient / d) * diff;
  }
  return s + w;
}

Vec2 correction_velocity(int self, std::span<const Vec2> positions,
                         const NeighborSets &sets, const FieldParams &params,
                         const Vec2 &v_sh) {
  const Vec2 g = potential_descent(self, positions, sets, params);
  const double magnitude = norm(v_sh) + params.b;
  return {magnitude * signum(g.x), magnitude * signum(g.y)};
}

Vec2 combined_velocity(const Vec2 &v_s, const Vec2 &v_h, const Vec2 &v_m,
                       double max_speed) {
  const Vec2 sum = v_s + v_h + v_m;
  const double len = norm(sum);
  if (len == 0.0) return {};
  return (max_speed / len) * sum;
}

}  // namespace pursuit
