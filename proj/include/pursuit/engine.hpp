#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pursuit/capture.hpp"
#include "pursuit/control.hpp"
#include "pursuit/evader.hpp"
#include "pursuit/fields.hpp"
#include "pursuit/geometry.hpp"
#include "pursuit/scenario.hpp"

namespace pursuit {

struct SimConfig {
  double dt = 0.01;
  double horizon = 200.0;
  CaptureParams capture;
  std::optional<FieldParams> fields;
  ControlMode mode = ControlMode::kSp2;
  std::uint64_t seed = 0;

  friend bool operator==(const SimConfig &, const SimConfig &) = default;
};

// Config as written in the scenario document.
SimConfig config_from(const ScenarioDoc &doc);

struct FrameMetrics {
  double theta_g = 0.0;
  double sum_r = 0.0;
  double success_rate = 0.0;
  double min_dist = 0.0;
  std::vector<double> edge_lengths;  // polygon edges, cycle order

  friend bool operator==(const FrameMetrics &, const FrameMetrics &) = default;
};

struct Frame {
  double t = 0.0;
  std::vector<Vec2> pursuers;
  Vec2 evader;
  RingView ring;
  // Controls applied from this frame to the next; empty on the last frame.
  std::vector<ControlState> controls;
  Vec2 evader_velocity;
  FrameMetrics metrics;

  friend bool operator==(const Frame &, const Frame &) = default;
};

enum class VerdictKind { kRunning, kCaptured, kHorizonExceeded, kError };

std::string_view to_string(VerdictKind kind);

struct Verdict {
  VerdictKind kind = VerdictKind::kRunning;
  int by = -1;  // capturing pursuer id
  double t_c = 0.0;
  std::string detail;

  friend bool operator==(const Verdict &, const Verdict &) = default;
};

// Noteworthy transitions: ring reordering, the evader leaving or re-entering
// the pursuer polygon, polygon edges leaving (R_o, R_f).
struct TraceEvent {
  long tick = 0;
  std::string kind;
  std::string detail;

  friend bool operator==(const TraceEvent &, const TraceEvent &) = default;
};

struct SimTrace {
  std::vector<Frame> frames;
  Verdict verdict;
  std::optional<CaptureCertificate> certificate;
  std::vector<TraceEvent> events;

  friend bool operator==(const SimTrace &, const SimTrace &) = default;
};

// Immutable per-run data derived from a scenario.
struct RunSetup {
  std::vector<PursuerSpec> specs;
  std::vector<double> lambdas;
  std::vector<double> thetas;
  double sensing_radius = 100.0;
  std::optional<std::vector<std::vector<int>>> omega;  // indices
  std::vector<std::vector<int>> polygon;               // indices
  std::optional<std::vector<int>> polygon_cycle;
  SimConfig config;
};

RunSetup make_setup(const ScenarioDoc &doc, const SimConfig &config);

// Omega_i at the given positions (explicit lists or sensing radius).
std::vector<int> omega_of(const RunSetup &setup, int self,
                          std::span<const Vec2> positions);

// Builds a frame at time t from positions, recomputing ring and metrics.
Frame make_frame(double t, std::vector<Vec2> pursuers, const Vec2 &evader,
                 const RunSetup &setup);

// Controls for every pursuer from a frozen frame, indexed like the pursuers.
std::vector<ControlState> compute_controls(const Frame &frame,
                                           const RunSetup &setup);

struct StepResult {
  std::vector<ControlState> controls;  // computed from the input frame
  Vec2 evader_velocity;
  Frame next;
  std::optional<CaptureHit> capture;
};

// One explicit Euler tick. `tick` is the index of the input frame.
StepResult step(const Frame &frame, long tick, const RunSetup &setup,
                EvaderController &evader);

// Incremental driver shared by batch runs and live sessions.
class Simulation {
 public:
  Simulation(const ScenarioDoc &doc, const SimConfig &config);

  const SimTrace &trace() const { return trace_; }
  SimTrace release_trace() { return std::move(trace_); }
  const Frame &current() const { return trace_.frames.back(); }
  long tick() const { return static_cast<long>(trace_.frames.size()) - 1; }
  bool finished() const {
    return trace_.verdict.kind != VerdictKind::kRunning;
  }
  const RunSetup &setup() const { return setup_; }
  EvaderController &evader() { return evader_; }

  // Advances one tick unless finished. Returns the newest frame.
  const Frame &advance();

 private:
  void record_events(const Frame &prev, const Frame &next, long tick);

  ScenarioDoc doc_;
  RunSetup setup_;
  EvaderController evader_;
  SimTrace trace_;
  long max_ticks_ = 0;
  bool outside_polygon_ = false;
  bool edges_out_of_band_ = false;
};

SimTrace run(const ScenarioDoc &doc, const SimConfig &config);
inline SimTrace run(const ScenarioDoc &doc) { return run(doc, config_from(doc)); }

struct MetricsRow {
  double t = 0.0;
  double theta_g = 0.0;
  double sum_r = 0.0;
  double success_rate = 0.0;
  double min_dist = 0.0;
  double edge_min = 0.0;
  double edge_max = 0.0;
};

std::vector<MetricsRow> metrics_series(const SimTrace &trace);

}  // namespace pursuit
