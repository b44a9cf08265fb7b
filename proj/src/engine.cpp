#include "pursuit/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pursuit/error.hpp"

namespace pursuit {

namespace {

std::vector<int> ids_to_indices(const std::vector<int> &ids,
                                const std::vector<PursuerInit> &pursuers) {
  std::vector<int> out;
  out.reserve(ids.size());
  for (int id : ids) {
    const auto it =
        std::find_if(pursuers.begin(), pursuers.end(),
                     [id](const PursuerInit &p) { return p.id == id; });
    out.push_back(static_cast<int>(it - pursuers.begin()));
  }
  return out;
}

// Earliest fraction of the tick at which pursuer and evader come within d_c
// along their straight-line motion, if any.
std::optional<double> segment_entry(const Vec2 &rel0, const Vec2 &rel1,
                                    double d_c) {
  const Vec2 d = rel1 - rel0;
  const double a = dot(d, d);
  if (a == 0.0) return std::nullopt;
  const double b = 2.0 * dot(rel0, d);
  const double c = dot(rel0, rel0) - d_c * d_c;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double s = (-b - std::sqrt(disc)) / (2.0 * a);
  if (s < 0.0 || s > 1.0) return std::nullopt;
  return s;
}

bool same_cyclic_order(const std::vector<int> &a, const std::vector<int> &b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  const auto it = std::find(b.begin(), b.end(), a.front());
  if (it == b.end()) return false;
  const std::size_t offset = static_cast<std::size_t>(it - b.begin());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[(i + offset) % b.size()]) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::kRunning: return "running";
    case VerdictKind::kCaptured: return "captured";
    case VerdictKind::kHorizonExceeded: return "horizon_exceeded";
    case VerdictKind::kError: return "error";
  }
  return "unknown";
}

SimConfig config_from(const ScenarioDoc &doc) {
  SimConfig c;
  c.dt = doc.sim.dt;
  c.horizon = doc.sim.horizon;
  c.capture = {doc.d_c, lambda_min(doc)};
  c.fields = doc.fields;
  c.mode = doc.sim.mode;
  c.seed = doc.sim.seed;
  return c;
}

RunSetup make_setup(const ScenarioDoc &doc, const SimConfig &config) {
  RunSetup s;
  s.config = config;
  s.sensing_radius = doc.neighbor.sensing_radius;
  const int n = static_cast<int>(doc.pursuers.size());
  for (const PursuerInit &p : doc.pursuers) {
    const double lambda = p.max_speed / doc.evader.max_speed;
    s.specs.push_back({p.id, p.max_speed, lambda});
    s.lambdas.push_back(lambda);
    s.thetas.push_back(occupied_angle(lambda));
  }
  if (doc.neighbor.omega) {
    std::vector<std::vector<int>> omega;
    for (const auto &ids : *doc.neighbor.omega) {
      omega.push_back(ids_to_indices(ids, doc.pursuers));
    }
    s.omega = std::move(omega);
  }
  if (doc.neighbor.polygon) {
    for (const auto &ids : *doc.neighbor.polygon) {
      s.polygon.push_back(ids_to_indices(ids, doc.pursuers));
    }
  } else if (n >= 3) {
    for (int i = 0; i < n; ++i) {
      s.polygon.push_back({(i + n - 1) % n, (i + 1) % n});
    }
  } else if (n == 2) {
    s.polygon = {{1}, {0}};
  } else {
    s.polygon.assign(n, {});
  }
  s.polygon_cycle = polygon_cycle(s.polygon);
  return s;
}

std::vector<int> omega_of(const RunSetup &setup, int self,
                          std::span<const Vec2> positions) {
  if (setup.omega) return (*setup.omega)[self];
  std::vector<int> out;
  for (int j = 0; j < static_cast<int>(positions.size()); ++j) {
    if (j != self &&
        distance(positions[j], positions[self]) <= setup.sensing_radius) {
      out.push_back(j);
    }
  }
  return out;
}

Frame make_frame(double t, std::vector<Vec2> pursuers, const Vec2 &evader,
                 const RunSetup &setup) {
  Frame f;
  f.t = t;
  f.evader = evader;
  f.pursuers = std::move(pursuers);
  const int n = static_cast<int>(f.pursuers.size());

  std::vector<PolarCoord> polars(n);
  bool degenerate = false;
  f.metrics.min_dist = n > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = distance(f.pursuers[i], evader);
    f.metrics.sum_r += r;
    f.metrics.min_dist = std::min(f.metrics.min_dist, r);
    if (r == 0.0) {
      degenerate = true;
    } else {
      polars[i] = to_local_polar(f.pursuers[i], evader);
    }
  }

  if (degenerate) {
    // A pursuer sitting on the evader dominates every heading.
    f.ring.group_occupied = kTwoPi;
    f.ring.success_rate = 1.0;
  } else if (n >= 2) {
    f.ring = ring_view(polars, setup.lambdas);
  } else if (n == 1) {
    f.ring.order = {0};
    f.ring.group_occupied = setup.thetas[0];
    f.ring.escapable_total = kTwoPi - setup.thetas[0];
    f.ring.success_rate = setup.thetas[0] / kTwoPi;
    f.ring.n_min = kTwoPi / setup.thetas[0];
  }
  f.metrics.theta_g = f.ring.group_occupied;
  f.metrics.success_rate = f.ring.success_rate;

  if (setup.polygon_cycle) {
    const auto &cyc = *setup.polygon_cycle;
    for (std::size_t k = 0; k < cyc.size(); ++k) {
      f.metrics.edge_lengths.push_back(distance(
          f.pursuers[cyc[k]], f.pursuers[cyc[(k + 1) % cyc.size()]]));
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j : setup.polygon[i]) {
        if (i < j) {
          f.metrics.edge_lengths.push_back(
              distance(f.pursuers[i], f.pursuers[j]));
        }
      }
    }
  }
  return f;
}

std::vector<ControlState> compute_controls(const Frame &frame,
                                           const RunSetup &setup) {
  const int n = static_cast<int>(frame.pursuers.size());
  std::vector<PolarCoord> polars(n);
  for (int i = 0; i < n; ++i) {
    polars[i] = to_local_polar(frame.pursuers[i], frame.evader);
  }

  std::vector<ControlState> controls(n);
  if (n == 1) {
    const RingNeighborhood lone{0.0, 0.0, polars[0].r, polars[0].r,
                                setup.thetas[0], setup.thetas[0]};
    controls[0] = pursuit_velocity(polars[0], lone, setup.specs[0]);
  } else {
    const RingView &ring = frame.ring;
    for (int j = 0; j < n; ++j) {
      const int i = ring.order[j];
      const int next = ring.order[(j + 1) % n];
      const int prev = ring.order[(j + n - 1) % n];
      const RingNeighborhood hood{ring.coverage[(j + n - 1) % n],
                                  ring.coverage[j],
                                  polars[prev].r,
                                  polars[next].r,
                                  setup.thetas[prev],
                                  setup.thetas[next]};
      controls[i] = pursuit_velocity(polars[i], hood, setup.specs[i]);
    }
  }

  if (setup.config.mode == ControlMode::kSp5) {
    const FieldParams &fields = *setup.config.fields;
    for (int i = 0; i < n; ++i) {
      NeighborSets sets;
      sets.omega = omega_of(setup, i, frame.pursuers);
      sets.polygon = setup.polygon[i];
      ControlState &c = controls[i];
      c.v_correction = correction_velocity(i, frame.pursuers, sets, fields,
                                           c.v_surround + c.v_hunt);
      c.v_total = combined_velocity(c.v_surround, c.v_hunt, c.v_correction,
                                    setup.specs[i].max_speed);
    }
  }
  return controls;
}

StepResult step(const Frame &frame, long tick, const RunSetup &setup,
                EvaderController &evader) {
  const double dt = setup.config.dt;
  StepResult out;
  out.controls = compute_controls(frame, setup);
  out.evader_velocity =
      evader.velocity(frame.t, dt, frame.evader, frame.pursuers);

  const int n = static_cast<int>(frame.pursuers.size());
  std::vector<Vec2> moved(n);
  for (int i = 0; i < n; ++i) {
    moved[i] = frame.pursuers[i] + dt * out.controls[i].v_total;
  }
  Vec2 evader_moved = frame.evader + dt * out.evader_velocity;
  double t_next = static_cast<double>(tick + 1) * dt;

  const double d_c = setup.config.capture.d_c;
  out.capture = capture_check(moved, evader_moved, d_c);
  if (!out.capture) {
    // A fast pass can cross the capture disk between samples.
    std::optional<double> earliest;
    for (int i = 0; i < n; ++i) {
      const auto s = segment_entry(frame.pursuers[i] - frame.evader,
                                   moved[i] - evader_moved, d_c);
      if (s && (!earliest || *s < *earliest)) earliest = s;
    }
    if (earliest) {
      double s = *earliest;
      for (int attempt = 0; attempt < 64; ++attempt) {
        for (int i = 0; i < n; ++i) {
          moved[i] = frame.pursuers[i] + (s * dt) * out.controls[i].v_total;
        }
        evader_moved = frame.evader + (s * dt) * out.evader_velocity;
        out.capture = capture_check(moved, evader_moved, d_c);
        if (out.capture || s >= 1.0) break;
        s = std::min(1.0, std::nextafter(s, 2.0) + 1e-15);
      }
      t_next = frame.t + s * dt;
    }
  }
  out.next = make_frame(t_next, std::move(moved), evader_moved, setup);
  return out;
}

Simulation::Simulation(const ScenarioDoc &doc, const SimConfig &config)
    : doc_(doc),
      setup_(),
      evader_([&] {
        EvaderSpec spec = doc.evader;
        if (spec.strategy == EvaderStrategy::kRandom) spec.seed = config.seed;
        return spec;
      }()) {
  require_valid(doc_);
  if (!(config.dt > 0.0) || !(config.horizon > config.dt)) {
    throw Error(ErrorKind::kValidation, "config: need dt > 0 and horizon > dt");
  }
  if (config.mode == ControlMode::kSp5 && !config.fields) {
    throw Error(ErrorKind::kValidation, "config: sp5 mode needs field params");
  }
  setup_ = make_setup(doc_, config);
  max_ticks_ = static_cast<long>(std::llround(config.horizon / config.dt));

  std::vector<Vec2> start;
  for (const PursuerInit &p : doc_.pursuers) start.push_back(p.position);
  trace_.frames.push_back(make_frame(0.0, start, doc_.evader_position, setup_));

  if (config.mode == ControlMode::kSp5 && start.size() >= 3) {
    std::vector<NeighborSets> sets(start.size());
    for (int i = 0; i < static_cast<int>(start.size()); ++i) {
      sets[i].omega = omega_of(setup_, i, start);
      sets[i].polygon = setup_.polygon[i];
    }
    trace_.certificate =
        theorem2_certificate(start, doc_.evader_position, *config.fields,
                             config.capture, sets);
  }
  if (setup_.polygon_cycle) {
    std::vector<Vec2> outline;
    for (int i : *setup_.polygon_cycle) outline.push_back(start[i]);
    outside_polygon_ = !strictly_inside(outline, doc_.evader_position);
  }
}

const Frame &Simulation::advance() {
  if (finished()) return current();
  const long k = tick();
  if (k >= max_ticks_) {
    trace_.verdict = {VerdictKind::kHorizonExceeded, -1, current().t, ""};
    return current();
  }
  StepResult r;
  try {
    r = step(current(), k, setup_, evader_);
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::kDegeneratePosition) {
      const auto hit = capture_check(current().pursuers, current().evader,
                                     setup_.config.capture.d_c);
      trace_.verdict = {VerdictKind::kCaptured,
                        hit ? setup_.specs[hit->pursuer].id : -1, current().t,
                        e.what()};
    } else {
      trace_.verdict = {VerdictKind::kError, -1, current().t,
                        std::string(to_string(e.kind())) + ": " + e.what()};
    }
    return current();
  }
  Frame &prev = trace_.frames.back();
  prev.controls = std::move(r.controls);
  prev.evader_velocity = r.evader_velocity;
  record_events(prev, r.next, k + 1);
  trace_.frames.push_back(std::move(r.next));

  if (r.capture) {
    trace_.verdict = {VerdictKind::kCaptured,
                      setup_.specs[r.capture->pursuer].id, current().t, ""};
  } else if (k + 1 >= max_ticks_) {
    trace_.verdict = {VerdictKind::kHorizonExceeded, -1, current().t, ""};
  }
  return current();
}

void Simulation::record_events(const Frame &prev, const Frame &next,
                               long tick) {
  if (!same_cyclic_order(prev.ring.order, next.ring.order)) {
    std::ostringstream d;
    for (int i : next.ring.order) d << setup_.specs[i].id << ' ';
    trace_.events.push_back({tick, "ring_reorder", d.str()});
  }
  if (setup_.polygon_cycle) {
    std::vector<Vec2> outline;
    for (int i : *setup_.polygon_cycle) outline.push_back(next.pursuers[i]);
    const bool outside = !strictly_inside(outline, next.evader);
    if (outside != outside_polygon_) {
      trace_.events.push_back(
          {tick, outside ? "containment_lost" : "containment_regained", ""});
      outside_polygon_ = outside;
    }
  }
  if (setup_.config.fields) {
    const FieldParams &f = *setup_.config.fields;
    bool out_of_band = false;
    for (double e : next.metrics.edge_lengths) {
      if (!(e > f.r_o && e < f.r_f)) out_of_band = true;
    }
    if (out_of_band != edges_out_of_band_) {
      trace_.events.push_back(
          {tick, out_of_band ? "edge_band_violation" : "edge_band_restored",
           ""});
      edges_out_of_band_ = out_of_band;
    }
  }
}

SimTrace run(const ScenarioDoc &doc, const SimConfig &config) {
  Simulation sim(doc, config);
  while (!sim.finished()) sim.advance();
  return sim.release_trace();
}

std::vector<MetricsRow> metrics_series(const SimTrace &trace) {
  std::vector<MetricsRow> rows;
  rows.reserve(trace.frames.size());
  for (const Frame &f : trace.frames) {
    MetricsRow row{f.t, f.metrics.theta_g, f.metrics.sum_r,
                   f.metrics.success_rate, f.metrics.min_dist, 0.0, 0.0};
    const auto &e = f.metrics.edge_lengths;
    if (!e.empty()) {
      row.edge_min = *std::min_element(e.begin(), e.end());
      row.edge_max = *std::max_element(e.begin(), e.end());
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pursuit
