#pragma once

#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "pursuit/vec2.hpp"

namespace pursuit {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Position of a pursuer in the polar frame centered on the evader.
struct PolarCoord {
  double r = 0.0;      // polar radius, >= 0
  double alpha = 0.0;  // polar angle in [0, 2*pi)
};

// Locus of interception points for one pursuer moving straight at full
// speed against a straight-moving evader, expressed in the evader frame.
struct ApolloniusDisk {
  Vec2 center;
  double radius = 0.0;
  double occupied_angle = 0.0;  // angle subtended at the evader
};

struct MeetingLocus {
  Vec2 point;
};

// Pursuers sorted counterclockwise around the evader together with the
// coverage angle between each adjacent pair.
struct RingView {
  // Pursuer indices sorted by ascending polar angle, ties by index.
  std::vector<int> order;
  // coverage[j] is the gap between order[j] and order[j + 1] (wrapping).
  // Negative or zero means the occupied sectors overlap.
  std::vector<double> coverage;
  double group_occupied = 0.0;
  double escapable_total = 0.0;
  double success_rate = 0.0;
  double n_min = 0.0;

  friend bool operator==(const RingView &, const RingView &) = default;
};

double wrap_two_pi(double angle);

PolarCoord to_local_polar(const Vec2 &pursuer, const Vec2 &evader);

Vec2 from_local_polar(const PolarCoord &polar);

// Occupied angle 2*asin(lambda) for a speed ratio strictly inside (0, 1).
double occupied_angle(double lambda);

ApolloniusDisk apollonius_disk(const Vec2 &local_position, double lambda);

// Point on the disk boundary at parameter `phi` measured around its center.
MeetingLocus meeting_point(const ApolloniusDisk &disk, double phi);

// `uniform_theta` selects the per-pursuer occupied angle used for n_min;
// when absent the mean occupied angle is used.
RingView ring_view(std::span<const PolarCoord> polars,
                   std::span<const double> lambdas,
                   std::optional<double> uniform_theta = std::nullopt);

// Group occupied angle from a coverage vector and the sum of occupied angles.
double group_occupied_from_coverage(std::span<const double> coverage,
                                    double theta_sum);

struct PursuerCountBound {
  double bound = 0.0;  // the strict lower bound on n
  int minimum = 0;     // smallest integer strictly above `bound`
  bool vacuous = false;  // d_c * lambda_min >= R_p; any n >= 3 works
};

// Pursuers needed so that a polygon of circumradius `polygon_radius` with
// edges no longer than 2 * d_c * lambda_min exists.
PursuerCountBound required_pursuer_count(double capture_radius,
                                         double lambda_min,
                                         double polygon_radius);

// Unsigned angle at the evader between two pursuers, in [0, pi].
double included_angle(const PolarCoord &a, const PolarCoord &b);

// Distance between two pursuers given in evader polar coordinates.
double polar_distance(const PolarCoord &a, const PolarCoord &b);

}  // namespace pursuit
