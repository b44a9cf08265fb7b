#include "pursuit/capture.hpp"

#include <algorithm>
#include <cmath>

#include "pursuit/error.hpp"

namespace pursuit {

bool lemma1_holds(const PolarCoord &a, const PolarCoord &b, double lambda_a,
                  double lambda_b, double d_c) {
  if (a.r <= d_c || b.r <= d_c) {
    throw Error(ErrorKind::kAlreadyCaptured,
                "a pursuer is already within the capture radius");
  }
  const double d = polar_distance(a, b);
  return d <= 2.0 * d_c * std::min(lambda_a, lambda_b);
}

bool strictly_inside(std::span<const Vec2> polygon, const Vec2 &point) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  int winding = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = polygon[i] - point;
    const Vec2 b = polygon[(i + 1) % n] - point;
    const double c = cross(a, b);
    // On the edge (collinear and between the endpoints).
    if (c == 0.0 && dot(a, b) <= 0.0) return false;
    if (a.y <= 0.0) {
      if (b.y > 0.0 && c > 0.0) ++winding;
    } else {
      if (b.y <= 0.0 && c < 0.0) --winding;
    }
  }
  return winding != 0;
}

bool lemma2_holds(std::span<const Vec2> polygon, const Vec2 &evader,
                  const CaptureParams &params) {
  const std::size_t n = polygon.size();
  if (n < 3) {
    throw Error(ErrorKind::kNotApplicable,
                "a pursuer polygon needs at least three vertices");
  }
  if (!strictly_inside(polygon, evader)) {
    throw Error(ErrorKind::kNotApplicable,
                "evader is not strictly inside the pursuer polygon");
  }
  for (const Vec2 &v : polygon) {
    if (distance(v, evader) <= params.d_c) {
      throw Error(ErrorKind::kAlreadyCaptured,
                  "a polygon vertex is within the capture radius");
    }
  }
  const double limit = 2.0 * params.d_c * params.lambda_min;
  for (std::size_t i = 0; i < n; ++i) {
    if (distance(polygon[i], polygon[(i + 1) % n]) > limit) return false;
  }
  return true;
}

std::optional<std::vector<int>> polygon_cycle(
    std::span<const std::vector<int>> polygon_sets) {
  const int n = static_cast<int>(polygon_sets.size());
  if (n < 3) return std::nullopt;
  for (int i = 0; i < n; ++i) {
    const auto &s = polygon_sets[i];
    if (s.size() != 2 || s[0] == s[1] || s[0] == i || s[1] == i) {
      return std::nullopt;
    }
    for (int j : s) {
      if (j < 0 || j >= n) return std::nullopt;
      const auto &back = polygon_sets[j];
      if (std::find(back.begin(), back.end(), i) == back.end()) {
        return std::nullopt;
      }
    }
  }
  std::vector<int> cycle{0};
  int prev = 0;
  int cur = polygon_sets[0][1];
  while (cur != 0) {
    if (static_cast<int>(cycle.size()) >= n) return std::nullopt;
    cycle.push_back(cur);
    const auto &s = polygon_sets[cur];
    const int next = s[0] == prev ? s[1] : s[0];
    prev = cur;
    cur = next;
  }
  if (static_cast<int>(cycle.size()) != n) return std::nullopt;
  return cycle;
}

CaptureCertificate theorem2_certificate(
    std::span<const Vec2> pursuers, const Vec2 &evader,
    const FieldParams &fields, const CaptureParams &capture,
    std::span<const NeighborSets> neighbors) {
  const int n = static_cast<int>(pursuers.size());
  if (n < 3) {
    throw Error(ErrorKind::kNotApplicable,
                "the polygon certificate needs at least three pursuers");
  }
  CaptureCertificate cert;
  const bool sets_sized = static_cast<int>(neighbors.size()) == n;
  auto valid_index = [n](int j) { return j >= 0 && j < n; };

  cert.cond_edges_ok = sets_sized;
  cert.cond_separation_ok = sets_sized;
  if (sets_sized) {
    for (int i = 0; i < n; ++i) {
      for (int j : neighbors[i].polygon) {
        if (!valid_index(j) ||
            !(distance(pursuers[i], pursuers[j]) < fields.r_f)) {
          cert.cond_edges_ok = false;
        }
      }
      for (int j : neighbors[i].omega) {
        if (!valid_index(j) ||
            !(distance(pursuers[i], pursuers[j]) > fields.r_o)) {
          cert.cond_separation_ok = false;
        }
      }
    }
  }

  cert.cond_radii_ok = 0.0 < fields.r_o && fields.r_o < fields.r_b &&
                       fields.r_b < fields.r_c && fields.r_c < fields.r_f &&
                       fields.r_f <= 2.0 * capture.d_c * capture.lambda_min;

  std::vector<std::vector<int>> polygon_sets;
  std::optional<std::vector<int>> cycle;
  if (sets_sized) {
    for (const auto &s : neighbors) polygon_sets.push_back(s.polygon);
    cycle = polygon_cycle(polygon_sets);
  }

  cert.cond_topology_ok = cycle.has_value();
  if (cert.cond_topology_ok) {
    for (int i = 0; i < n; ++i) {
      const auto &omega = neighbors[i].omega;
      for (int j : neighbors[i].polygon) {
        if (std::find(omega.begin(), omega.end(), j) == omega.end()) {
          cert.cond_topology_ok = false;
        }
      }
    }
    // Ring neighbors around the evader must be the polygon neighbors.
    bool coincident = false;
    std::vector<PolarCoord> polars(n);
    for (int i = 0; i < n; ++i) {
      if (pursuers[i] == evader) coincident = true;
    }
    if (coincident) {
      cert.cond_topology_ok = false;
    } else {
      for (int i = 0; i < n; ++i) polars[i] = to_local_polar(pursuers[i], evader);
      std::vector<double> dummy(n, 0.5);
      const RingView ring = ring_view(polars, dummy);
      for (int jpos = 0; jpos < n; ++jpos) {
        const int i = ring.order[jpos];
        const int next = ring.order[(jpos + 1) % n];
        const auto &s = neighbors[i].polygon;
        if (std::find(s.begin(), s.end(), next) == s.end()) {
          cert.cond_topology_ok = false;
        }
      }
    }
  }

  std::vector<Vec2> outline;
  if (cycle) {
    for (int i : *cycle) outline.push_back(pursuers[i]);
  } else {
    outline.assign(pursuers.begin(), pursuers.end());
  }
  cert.evader_inside = strictly_inside(outline, evader);

  cert.guaranteed = cert.cond_edges_ok && cert.cond_separation_ok &&
                    cert.cond_radii_ok && cert.cond_topology_ok &&
                    cert.evader_inside;
  return cert;
}

std::optional<CaptureHit> capture_check(std::span<const Vec2> pursuers,
                                        const Vec2 &evader, double d_c) {
  std::optional<CaptureHit> best;
  for (std::size_t i = 0; i < pursuers.size(); ++i) {
    const double d = distance(pursuers[i], evader);
    if (d <= d_c && (!best || d < best->distance)) {
      best = CaptureHit{static_cast<int>(i), d};
    }
  }
  return best;
}

}  // namespace pursuit
