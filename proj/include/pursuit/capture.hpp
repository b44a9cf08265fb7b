#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pursuit/fields.hpp"
#include "pursuit/geometry.hpp"
#include "pursuit/vec2.hpp"

namespace pursuit {

struct CaptureParams {
  double d_c = 0.0;         // capture radius
  double lambda_min = 0.0;  // smallest pursuer/evader speed ratio

  friend bool operator==(const CaptureParams &,
                         const CaptureParams &) = default;
};

struct CaptureCertificate {
  bool cond_edges_ok = false;       // polygon edges shorter than R_f
  bool cond_separation_ok = false;  // neighbor distances above R_o
  bool cond_radii_ok = false;       // R_o < R_b < R_c < R_f <= 2 d_c lambda
  bool cond_topology_ok = false;    // ring neighbors in S_i, S_i in Omega_i
  bool evader_inside = false;       // strictly inside the pursuer polygon
  bool guaranteed = false;

  friend bool operator==(const CaptureCertificate &,
                         const CaptureCertificate &) = default;
};

// True when the two pursuers are close enough that their occupied sectors
// must overlap. Throws kAlreadyCaptured if either radius is <= d_c.
bool lemma1_holds(const PolarCoord &a, const PolarCoord &b, double lambda_a,
                  double lambda_b, double d_c);

// Winding-number test; points on the boundary are outside.
bool strictly_inside(std::span<const Vec2> polygon, const Vec2 &point);

// True iff every polygon edge is <= 2 d_c lambda_min. Throws
// kNotApplicable when n < 3 or the evader is not strictly inside, and
// kAlreadyCaptured when a vertex is within d_c.
bool lemma2_holds(std::span<const Vec2> polygon, const Vec2 &evader,
                  const CaptureParams &params);

// Recovers the polygon vertex cycle from the maintenance sets. Returns
// nothing if the sets do not form a single cycle through every pursuer.
std::optional<std::vector<int>> polygon_cycle(
    std::span<const std::vector<int>> polygon_sets);

// Evaluated on the initial configuration. `neighbors[i].omega` and
// `neighbors[i].polygon` hold pursuer indices.
CaptureCertificate theorem2_certificate(std::span<const Vec2> pursuers,
                                        const Vec2 &evader,
                                        const FieldParams &fields,
                                        const CaptureParams &capture,
                                        std::span<const NeighborSets> neighbors);

struct CaptureHit {
  int pursuer = -1;  // index into the position list
  double distance = 0.0;
};

// Closest pursuer within d_c (inclusive), ties broken by lower index.
std::optional<CaptureHit> capture_check(std::span<const Vec2> pursuers,
                                        const Vec2 &evader, double d_c);

}  // namespace pursuit
