#include "pursuit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pursuit/error.hpp"

namespace pursuit {

namespace {

void require_speed_ratio(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    std::ostringstream msg;
    msg << "speed ratio must lie in (0, 1), got " << lambda;
    throw Error(ErrorKind::kInvalidSpeedRatio, msg.str());
  }
}

}  // namespace

double wrap_two_pi(double angle) {
  double wrapped = std::fmod(angle, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  // fmod of a tiny negative number can round up to exactly 2*pi.
  if (wrapped >= kTwoPi) wrapped = 0.0;
  return wrapped;
}

PolarCoord to_local_polar(const Vec2 &pursuer, const Vec2 &evader) {
  const Vec2 rel = pursuer - evader;
  if (rel.x == 0.0 && rel.y == 0.0) {
    throw Error(ErrorKind::kDegeneratePosition,
                "pursuer coincides with the evader");
  }
  return {norm(rel), wrap_two_pi(std::atan2(rel.y, rel.x))};
}

Vec2 from_local_polar(const PolarCoord &polar) {
  return polar.r * unit_from_angle(polar.alpha);
}

double occupied_angle(double lambda) {
  require_speed_ratio(lambda);
  return 2.0 * std::asin(lambda);
}

ApolloniusDisk apollonius_disk(const Vec2 &local_position, double lambda) {
  require_speed_ratio(lambda);
  const double dist = norm(local_position);
  if (dist == 0.0) {
    throw Error(ErrorKind::kDegeneratePosition,
                "Apollonius disk of a pursuer at the evader position");
  }
  const double denom = 1.0 - lambda * lambda;
  return {local_position / denom, dist * lambda / denom,
          2.0 * std::asin(lambda)};
}

MeetingLocus meeting_point(const ApolloniusDisk &disk, double phi) {
  return {disk.center + disk.radius * unit_from_angle(phi)};
}

RingView ring_view(std::span<const PolarCoord> polars,
                   std::span<const double> lambdas,
                   std::optional<double> uniform_theta) {
  const std::size_t n = polars.size();
  if (n < 2) {
    throw Error(ErrorKind::kRingUndefined,
                "a pursuer ring needs at least two pursuers");
  }
  if (lambdas.size() != n) {
    throw Error(ErrorKind::kRingUndefined,
                "speed ratio count does not match pursuer count");
  }
  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(polars[i].r > 0.0)) {
      throw Error(ErrorKind::kDegeneratePosition,
                  "ring member with zero polar radius");
    }
    theta[i] = occupied_angle(lambdas[i]);
  }

  RingView view;
  view.order.resize(n);
  std::iota(view.order.begin(), view.order.end(), 0);
  std::stable_sort(view.order.begin(), view.order.end(), [&](int a, int b) {
    return polars[a].alpha < polars[b].alpha;
  });

  view.coverage.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const int cur = view.order[j];
    const int nxt = view.order[(j + 1) % n];
    double gap = polars[nxt].alpha - polars[cur].alpha;
    if (j + 1 == n) gap += kTwoPi;
    view.coverage[j] = gap - 0.5 * (theta[cur] + theta[nxt]);
  }

  const double theta_sum = std::accumulate(theta.begin(), theta.end(), 0.0);
  view.group_occupied = group_occupied_from_coverage(view.coverage, theta_sum);
  view.escapable_total = kTwoPi - view.group_occupied;
  view.success_rate = view.group_occupied / kTwoPi;

  double overlap_sum = 0.0;
  for (double eps : view.coverage) {
    if (eps <= 0.0) overlap_sum += eps;
  }
  const double theta_ref =
      uniform_theta.value_or(theta_sum / static_cast<double>(n));
  view.n_min = (kTwoPi - overlap_sum) / theta_ref;
  return view;
}

double group_occupied_from_coverage(std::span<const double> coverage,
                                    double theta_sum) {
  bool all_overlap = true;
  double group = theta_sum;
  for (double eps : coverage) {
    if (eps <= 0.0) {
      group += eps;
    } else {
      all_overlap = false;
    }
  }
  // With every gap overlapped the coverage identity makes the sum exactly
  // 2*pi; pin it so rounding cannot leave it a few ulps short.
  if (all_overlap) return kTwoPi;
  return std::min(group, kTwoPi);
}

PursuerCountBound required_pursuer_count(double capture_radius,
                                         double lambda_min,
                                         double polygon_radius) {
  if (!(capture_radius > 0.0) || !(polygon_radius > 0.0)) {
    throw Error(ErrorKind::kValidation,
                "capture radius and polygon radius must be positive");
  }
  require_speed_ratio(lambda_min);
  PursuerCountBound out;
  const double ratio = capture_radius * lambda_min / polygon_radius;
  if (ratio >= 1.0) {
    out.vacuous = true;
    out.bound = 2.0;
    out.minimum = 3;
    return out;
  }
  out.bound = kPi / std::asin(ratio);
  const double nearest = std::round(out.bound);
  if (std::abs(out.bound - nearest) <= 1e-9 * std::max(1.0, nearest)) {
    out.minimum = static_cast<int>(nearest) + 1;
  } else {
    out.minimum = static_cast<int>(std::floor(out.bound)) + 1;
  }
  return out;
}

double polar_distance(const PolarCoord &a, const PolarCoord &b) {
  const double d2 =
      a.r * a.r + b.r * b.r - 2.0 * a.r * b.r * std::cos(a.alpha - b.alpha);
  return std::sqrt(std::max(0.0, d2));
}

double included_angle(const PolarCoord &a, const PolarCoord &b) {
  if (!(a.r > 0.0) || !(b.r > 0.0)) {
    throw Error(ErrorKind::kDegeneratePosition,
                "included angle needs nonzero radii");
  }
  const double d = distance(from_local_polar(a), from_local_polar(b));
  const double c = (a.r * a.r + b.r * b.r - d * d) / (2.0 * a.r * b.r);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace pursuit
