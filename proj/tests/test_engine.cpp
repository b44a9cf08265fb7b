#include <doctest.h>

#include <cmath>
#include <vector>

#include "pursuit/engine.hpp"
#include "pursuit/error.hpp"

using namespace pursuit;
using doctest::Approx;

namespace {

ScenarioDoc bundled(const char *name) {
  return load_scenario(resolve_scenario_path(name));
}

ScenarioDoc one_pursuer(Vec2 pursuer, double v, EvaderStrategy strategy) {
  ScenarioDoc d;
  d.name = "single";
  d.pursuers = {{1, pursuer, v}};
  d.evader.max_speed = 1.0;
  d.evader.strategy = strategy;
  d.d_c = 1.0;
  d.sim.dt = 0.01;
  d.sim.horizon = 50;
  return d;
}

}  // namespace

TEST_CASE("single pursuer closes at full speed on a static evader") {
  const ScenarioDoc d = one_pursuer({10, 0}, 0.8, EvaderStrategy::kStatic);
  Simulation sim(d, config_from(d));
  sim.advance();
  const Frame &f = sim.current();
  CHECK(f.metrics.min_dist == Approx(10 - 0.8 * 0.01).epsilon(1e-14));
  CHECK(f.pursuers[0].y == 0.0);
  const SimTrace tr = run(d);
  CHECK(tr.verdict.kind == VerdictKind::kCaptured);
  CHECK(tr.verdict.by == 1);
  CHECK(tr.verdict.t_c == Approx(9.0 / 0.8).epsilon(1e-3));
}

TEST_CASE("motionless agents leave the frame unchanged") {
  ScenarioDoc d = bundled("scenario_A");
  d.evader.strategy = EvaderStrategy::kStatic;
  RunSetup setup = make_setup(d, config_from(d));
  for (PursuerSpec &s : setup.specs) s.max_speed = 0.0;
  EvaderController evader(d.evader);
  std::vector<Vec2> start;
  for (const PursuerInit &p : d.pursuers) start.push_back(p.position);
  const Frame f0 = make_frame(0.0, start, d.evader_position, setup);
  const StepResult r = step(f0, 0, setup, evader);
  CHECK(r.next.pursuers == f0.pursuers);
  CHECK(r.next.evader == f0.evader);
  CHECK(r.next.metrics == f0.metrics);
}

TEST_CASE("scenario A starts with an escapable angle") {
  const ScenarioDoc d = bundled("scenario_A");
  Simulation sim(d, config_from(d));
  const Frame &f = sim.current();
  CHECK(f.metrics.theta_g < 2 * kPi);
  double overlap = 0;
  int gaps = 0;
  for (double e : f.ring.coverage) {
    if (e <= 0) overlap += e;
    if (e > 0) ++gaps;
  }
  CHECK(gaps == 1);
  CHECK(f.metrics.theta_g == Approx(3 * occupied_angle(0.9) + overlap));
}

TEST_CASE("scenario B never closes the ring") {
  const SimTrace tr = run(bundled("scenario_B"));
  CHECK(tr.verdict.kind == VerdictKind::kHorizonExceeded);
  const double cap = 3 * occupied_angle(0.8);
  CHECK(cap / kPi == Approx(1.77).epsilon(0.005));
  for (const Frame &f : tr.frames) CHECK(f.metrics.theta_g <= cap + 1e-12);
  CHECK(tr.frames.back().t == Approx(200.0));
}

TEST_CASE("scenario C keeps its polygon and captures") {
  const ScenarioDoc d = bundled("scenario_C");
  const SimTrace tr = run(d);
  REQUIRE(tr.certificate);
  CHECK(tr.certificate->guaranteed);
  CHECK(tr.verdict.kind == VerdictKind::kCaptured);
  for (const Frame &f : tr.frames) {
    CHECK(f.metrics.theta_g == Approx(2 * kPi).epsilon(1e-12));
    for (double e : f.metrics.edge_lengths) {
      CHECK(e > d.fields->r_o);
      CHECK(e < d.fields->r_f);
    }
  }
  for (const MetricsRow &row : metrics_series(tr)) {
    CHECK(row.edge_max < d.fields->r_f);
    CHECK(row.theta_g <= 2 * kPi);
  }
  CHECK(tr.events.empty());
}

TEST_CASE("runs are deterministic") {
  for (const char *name : {"scenario_A", "scenario_C"}) {
    ScenarioDoc d = bundled(name);
    d.sim.horizon = 20;
    const SimTrace a = run(d);
    const SimTrace b = run(d);
    CHECK(a == b);
  }
}

TEST_CASE("all pursuers move from the same snapshot") {
  ScenarioDoc d = bundled("scenario_C");
  d.sim.horizon = 0.5;
  const SimTrace tr = run(d);
  const RunSetup setup = make_setup(d, config_from(d));
  for (std::size_t k = 0; k + 1 < tr.frames.size(); ++k) {
    const Frame &f = tr.frames[k];
    const auto controls = compute_controls(f, setup);
    REQUIRE(controls.size() == f.controls.size());
    for (std::size_t i = 0; i < controls.size(); ++i) {
      CHECK(controls[i] == f.controls[i]);
      const Vec2 want = f.pursuers[i] + d.sim.dt * f.controls[i].v_total;
      CHECK(tr.frames[k + 1].pursuers[i] == want);
    }
  }
}

TEST_CASE("halving the step barely moves the capture time") {
  ScenarioDoc d = bundled("scenario_C");
  const SimTrace coarse = run(d);
  d.sim.dt /= 2;
  const SimTrace fine = run(d);
  REQUIRE(coarse.verdict.kind == VerdictKind::kCaptured);
  REQUIRE(fine.verdict.kind == VerdictKind::kCaptured);
  CHECK(std::abs(fine.verdict.t_c - coarse.verdict.t_c) <
        0.05 * coarse.verdict.t_c);
}

TEST_CASE("a fast fly-through is caught between samples") {
  ScenarioDoc d = one_pursuer({-5, 0.5}, 0.9, EvaderStrategy::kStatic);
  d.sim.dt = 20.0;
  d.sim.horizon = 100.0;
  const SimTrace tr = run(d);
  REQUIRE(tr.verdict.kind == VerdictKind::kCaptured);
  CHECK(tr.frames.size() == 2);
  CHECK(tr.frames.back().metrics.min_dist <= d.d_c);
  CHECK(tr.frames.back().metrics.min_dist == Approx(d.d_c).epsilon(1e-9));
  CHECK(tr.verdict.t_c < d.sim.dt);
}

TEST_CASE("captured iff the last frame is within the capture distance") {
  for (const char *name : {"scenario_A", "scenario_B", "scenario_C"}) {
    ScenarioDoc d = bundled(name);
    d.sim.horizon = 30;
    const SimTrace tr = run(d);
    const auto rows = metrics_series(tr);
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
      CHECK(rows[k].min_dist > d.d_c);
    }
    CHECK((tr.verdict.kind == VerdictKind::kCaptured) ==
          (rows.back().min_dist <= d.d_c));
  }
}

TEST_CASE("sp5 speeds are zero or the maximum and sp2 speeds are the maximum") {
  ScenarioDoc c = bundled("scenario_C");
  const SimTrace tc = run(c);
  for (std::size_t k = 0; k + 1 < tc.frames.size(); ++k) {
    for (const ControlState &s : tc.frames[k].controls) {
      const double v = norm(s.v_total);
      CHECK((v == 0.0 || v == Approx(0.475).epsilon(1e-15)));
    }
  }
  ScenarioDoc a = bundled("scenario_A");
  a.sim.horizon = 20;
  const SimTrace ta = run(a);
  for (std::size_t k = 0; k + 1 < ta.frames.size(); ++k) {
    for (const ControlState &s : ta.frames[k].controls) {
      if (!s.fallback) CHECK(norm(s.v_total) == Approx(1.8).epsilon(1e-9));
      CHECK(std::abs(dot(s.v_surround, s.v_hunt)) <= 1e-12 * (1 + 1.8 * 1.8));
    }
  }
}

TEST_CASE("evader leaving the polygon is logged") {
  ScenarioDoc d = bundled("scenario_C");
  d.evader.strategy = EvaderStrategy::kScripted;
  d.evader.max_speed = 5.0;
  for (PursuerInit &p : d.pursuers) p.max_speed = 0.1;
  d.d_c = 0.5;
  d.evader.waypoints = {30.0 * unit_from_angle(5 * kPi / 12)};
  d.neighbor.polygon.reset();
  d.sim.horizon = 5;
  const SimTrace tr = run(d);
  bool lost = false;
  for (const TraceEvent &e : tr.events) lost = lost || e.kind == "containment_lost";
  CHECK(lost);
}

TEST_CASE("horizon verdict and metrics columns") {
  ScenarioDoc d = bundled("scenario_A");
  d.sim.horizon = 1.0;
  const SimTrace tr = run(d);
  CHECK(tr.verdict.kind == VerdictKind::kHorizonExceeded);
  CHECK(tr.frames.size() == 101);
  const auto rows = metrics_series(tr);
  REQUIRE(rows.size() == 101);
  CHECK(rows[0].t == 0.0);
  CHECK(rows[0].edge_min == Approx(40.0));
  CHECK(rows[0].edge_max == Approx(std::hypot(50.0, 60.0)));
  CHECK(rows[0].success_rate == Approx(rows[0].theta_g / (2 * kPi)));
}

TEST_CASE("invalid scenario is rejected before running") {
  ScenarioDoc d = bundled("scenario_A");
  d.pursuers[0].max_speed = 3.0;
  try {
    run(d);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kValidation);
  }
}
