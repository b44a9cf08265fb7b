#pragma once

#include <span>
#include <vector>

#include "pursuit/vec2.hpp"

namespace pursuit {

// Radii for the two potential bands. Valid parameters satisfy
// 0 < R_o < R_b < R_c < R_f, so the bands never overlap.
struct FieldParams {
  double r_c = 0.0;  // maintenance band inner radius
  double r_f = 0.0;  // maintenance band blow-up radius
  double r_o = 0.0;  // collision band blow-up radius
  double r_b = 0.0;  // collision band outer radius
  double b = 1.0;    // speed margin of the correction term

  bool ordered() const {
    return 0.0 < r_o && r_o < r_b && r_b < r_c && r_c < r_f && b > 0.0;
  }
  friend bool operator==(const FieldParams &, const FieldParams &) = default;
};

// Neighbor bookkeeping for one pursuer; entries are pursuer indices.
struct NeighborSets {
  std::vector<int> omega;    // pursuers whose positions are readable
  std::vector<int> polygon;  // the two polygon-adjacent pursuers
  std::vector<int> d_m;      // polygon members inside the maintenance band
  std::vector<int> d_o;      // omega members inside the collision band
};

struct PotentialSample {
  double value = 0.0;
  double gradient = 0.0;  // derivative with respect to the distance
};

// Distance-maintenance potential; nonzero only on [R_c, R_f).
PotentialSample maintenance_potential(double d, const FieldParams &params);

// Inter-collision potential; nonzero only on (R_o, R_b].
PotentialSample collision_potential(double d, const FieldParams &params);

// Fills d_m and d_o from current positions.
void classify_bands(int self, std::span<const Vec2> positions,
                    const FieldParams &params, NeighborSets &sets);

// Negated potential gradient with respect to the pursuer's own position
// (s_i + w_i).
Vec2 potential_descent(int self, std::span<const Vec2> positions,
                       const NeighborSets &sets, const FieldParams &params);

// (|v_sh| + b) * sgn(s_i + w_i), signum applied per component.
Vec2 correction_velocity(int self, std::span<const Vec2> positions,
                         const NeighborSets &sets, const FieldParams &params,
                         const Vec2 &v_sh);

// Normalizes v_s + v_h + v_m to the pursuer's max speed; a zero sum holds.
Vec2 combined_velocity(const Vec2 &v_s, const Vec2 &v_h, const Vec2 &v_m,
                       double max_speed);

}  // namespace pursuit
