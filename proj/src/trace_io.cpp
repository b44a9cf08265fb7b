#include "pursuit/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "pursuit/error.hpp"

namespace pursuit {

using nlohmann::json;

namespace {

constexpr int kTraceVersion = 1;

// JSON has no inf/nan, so those travel as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double get_num(const json &j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw Error(ErrorKind::kParse, "trace: expected a number, got " + j.dump());
}

json vec(const Vec2 &v) { return json::array({num(v.x), num(v.y)}); }

Vec2 get_vec(const json &j) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorKind::kParse, "trace: expected [x, y], got " + j.dump());
  }
  return {get_num(j[0]), get_num(j[1])};
}

json nums(const std::vector<double> &xs) {
  json out = json::array();
  for (double x : xs) out.push_back(num(x));
  return out;
}

std::vector<double> get_nums(const json &j) {
  std::vector<double> out;
  for (const json &x : j) out.push_back(get_num(x));
  return out;
}

json control_json(const ControlState &c) {
  return {{"alpha_rate", num(c.alpha_rate)}, {"beta", num(c.beta)},
          {"delta", num(c.delta)},           {"gamma", num(c.gamma)},
          {"k", num(c.k)},                   {"h", num(c.h)},
          {"v_s", vec(c.v_surround)},        {"v_h", vec(c.v_hunt)},
          {"v_m", vec(c.v_correction)},      {"v", vec(c.v_total)},
          {"fallback", c.fallback}};
}

ControlState control_from(const json &j) {
  ControlState c;
  c.alpha_rate = get_num(j.at("alpha_rate"));
  c.beta = get_num(j.at("beta"));
  c.delta = get_num(j.at("delta"));
  c.gamma = get_num(j.at("gamma"));
  c.k = get_num(j.at("k"));
  c.h = get_num(j.at("h"));
  c.v_surround = get_vec(j.at("v_s"));
  c.v_hunt = get_vec(j.at("v_h"));
  c.v_correction = get_vec(j.at("v_m"));
  c.v_total = get_vec(j.at("v"));
  c.fallback = j.at("fallback").get<bool>();
  return c;
}

json frame_json(const Frame &f) {
  json pursuers = json::array();
  for (const Vec2 &p : f.pursuers) pursuers.push_back(vec(p));
  json controls = json::array();
  for (const ControlState &c : f.controls) controls.push_back(control_json(c));
  return {
      {"t", num(f.t)},
      {"pursuers", pursuers},
      {"evader", vec(f.evader)},
      {"evader_velocity", vec(f.evader_velocity)},
      {"ring",
       {{"order", f.ring.order},
        {"coverage", nums(f.ring.coverage)},
        {"theta_G", num(f.ring.group_occupied)},
        {"escapable", num(f.ring.escapable_total)},
        {"P", num(f.ring.success_rate)},
        {"n_min", num(f.ring.n_min)}}},
      {"metrics",
       {{"theta_G", num(f.metrics.theta_g)},
        {"sum_r", num(f.metrics.sum_r)},
        {"P", num(f.metrics.success_rate)},
        {"min_dist", num(f.metrics.min_dist)},
        {"edges", nums(f.metrics.edge_lengths)}}},
      {"controls", controls},
  };
}

Frame frame_from(const json &j) {
  Frame f;
  f.t = get_num(j.at("t"));
  for (const json &p : j.at("pursuers")) f.pursuers.push_back(get_vec(p));
  f.evader = get_vec(j.at("evader"));
  f.evader_velocity = get_vec(j.at("evader_velocity"));
  const json &r = j.at("ring");
  f.ring.order = r.at("order").get<std::vector<int>>();
  f.ring.coverage = get_nums(r.at("coverage"));
  f.ring.group_occupied = get_num(r.at("theta_G"));
  f.ring.escapable_total = get_num(r.at("escapable"));
  f.ring.success_rate = get_num(r.at("P"));
  f.ring.n_min = get_num(r.at("n_min"));
  const json &m = j.at("metrics");
  f.metrics.theta_g = get_num(m.at("theta_G"));
  f.metrics.sum_r = get_num(m.at("sum_r"));
  f.metrics.success_rate = get_num(m.at("P"));
  f.metrics.min_dist = get_num(m.at("min_dist"));
  f.metrics.edge_lengths = get_nums(m.at("edges"));
  for (const json &c : j.at("controls")) f.controls.push_back(control_from(c));
  return f;
}

json config_json(const SimConfig &c) {
  json out{{"dt", num(c.dt)},
           {"horizon", num(c.horizon)},
           {"d_c", num(c.capture.d_c)},
           {"lambda_min", num(c.capture.lambda_min)},
           {"mode", std::string(to_string(c.mode))},
           {"seed", c.seed}};
  if (c.fields) {
    out["fields"] = {{"R_c", num(c.fields->r_c)}, {"R_f", num(c.fields->r_f)},
                     {"R_o", num(c.fields->r_o)}, {"R_b", num(c.fields->r_b)},
                     {"b", num(c.fields->b)}};
  }
  return out;
}

SimConfig config_from_json(const json &j) {
  SimConfig c;
  c.dt = get_num(j.at("dt"));
  c.horizon = get_num(j.at("horizon"));
  c.capture.d_c = get_num(j.at("d_c"));
  c.capture.lambda_min = get_num(j.at("lambda_min"));
  const auto mode = parse_control_mode(j.at("mode").get<std::string>());
  if (!mode) throw Error(ErrorKind::kParse, "trace: unknown mode");
  c.mode = *mode;
  c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("fields")) {
    const json &f = j.at("fields");
    c.fields = FieldParams{get_num(f.at("R_c")), get_num(f.at("R_f")),
                           get_num(f.at("R_o")), get_num(f.at("R_b")),
                           get_num(f.at("b"))};
  }
  return c;
}

json certificate_json(const CaptureCertificate &c) {
  return {{"edges_ok", c.cond_edges_ok},       {"separation_ok", c.cond_separation_ok},
          {"radii_ok", c.cond_radii_ok},       {"topology_ok", c.cond_topology_ok},
          {"evader_inside", c.evader_inside}, {"guaranteed", c.guaranteed}};
}

CaptureCertificate certificate_from(const json &j) {
  CaptureCertificate c;
  c.cond_edges_ok = j.at("edges_ok").get<bool>();
  c.cond_separation_ok = j.at("separation_ok").get<bool>();
  c.cond_radii_ok = j.at("radii_ok").get<bool>();
  c.cond_topology_ok = j.at("topology_ok").get<bool>();
  c.evader_inside = j.at("evader_inside").get<bool>();
  c.guaranteed = j.at("guaranteed").get<bool>();
  return c;
}

VerdictKind parse_verdict_kind(const std::string &s) {
  for (VerdictKind k : {VerdictKind::kRunning, VerdictKind::kCaptured,
                        VerdictKind::kHorizonExceeded, VerdictKind::kError}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::kParse, "trace: unknown verdict " + s);
}

void format_g9(std::string &out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out += buf;
}

}  // namespace

std::string_view to_string(TraceFormat format) {
  return format == TraceFormat::kColumnar ? "csv" : "json";
}

std::optional<TraceFormat> parse_trace_format(std::string_view name) {
  if (name == "csv" || name == "columnar") return TraceFormat::kColumnar;
  if (name == "json" || name == "structured") return TraceFormat::kStructured;
  return std::nullopt;
}

std::string columnar_text(const SimTrace &trace) {
  std::string out = kColumnarHeader;
  out += '\n';
  for (const MetricsRow &row : metrics_series(trace)) {
    const double cols[] = {row.t,        row.theta_g,  row.sum_r,
                           row.success_rate, row.min_dist, row.edge_min,
                           row.edge_max};
    for (std::size_t c = 0; c < std::size(cols); ++c) {
      if (c) out += ',';
      format_g9(out, cols[c]);
    }
    out += '\n';
  }
  return out;
}

std::string structured_text(const TraceFile &file) {
  const SimTrace &tr = file.trace;
  json root;
  root["format"] = "pursuit-trace";
  root["version"] = kTraceVersion;
  root["scenario"] = json::parse(dump_scenario(file.scenario));
  root["config"] = config_json(file.config);
  root["verdict"] = {{"kind", std::string(to_string(tr.verdict.kind))},
                     {"by", tr.verdict.by},
                     {"t_c", num(tr.verdict.t_c)},
                     {"detail", tr.verdict.detail}};
  root["certificate"] =
      tr.certificate ? certificate_json(*tr.certificate) : json(nullptr);
  json events = json::array();
  for (const TraceEvent &e : tr.events) {
    events.push_back({{"tick", e.tick}, {"kind", e.kind}, {"detail", e.detail}});
  }
  root["events"] = events;
  json frames = json::array();
  for (const Frame &f : tr.frames) frames.push_back(frame_json(f));
  root["frames"] = std::move(frames);
  return root.dump() + "\n";
}

void save_trace(const TraceFile &file, const std::filesystem::path &path,
                TraceFormat format) {
  if (file.trace.frames.empty()) {
    throw Error(ErrorKind::kValidation, "cannot save an empty trace");
  }
  const std::string text = format == TraceFormat::kColumnar
                               ? columnar_text(file.trace)
                               : structured_text(file);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write trace " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

TraceFile parse_trace(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::kParse, std::string("trace: ") + e.what());
  }
  if (!root.is_object() || root.value("format", "") != "pursuit-trace") {
    throw Error(ErrorKind::kParse, "trace: not a structured pursuit trace");
  }
  try {
    TraceFile file;
    file.scenario = parse_scenario(root.at("scenario").dump());
    file.config = config_from_json(root.at("config"));
    const json &v = root.at("verdict");
    file.trace.verdict.kind = parse_verdict_kind(v.at("kind").get<std::string>());
    file.trace.verdict.by = v.at("by").get<int>();
    file.trace.verdict.t_c = get_num(v.at("t_c"));
    file.trace.verdict.detail = v.at("detail").get<std::string>();
    if (!root.at("certificate").is_null()) {
      file.trace.certificate = certificate_from(root.at("certificate"));
    }
    for (const json &e : root.at("events")) {
      file.trace.events.push_back({e.at("tick").get<long>(),
                                   e.at("kind").get<std::string>(),
                                   e.at("detail").get<std::string>()});
    }
    for (const json &f : root.at("frames")) {
      file.trace.frames.push_back(frame_from(f));
    }
    if (file.trace.frames.empty()) {
      throw Error(ErrorKind::kParse, "trace: no frames");
    }
    return file;
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParse, std::string("trace: ") + e.what());
  }
}

TraceFile load_trace(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open trace " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_trace(buf.str());
  } catch (const Error &e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

namespace {

class Checker {
 public:
  explicit Checker(ReplayReport &report) : report_(report) {}

  void expect(bool ok, long tick, const char *check, const std::string &detail) {
    if (ok) return;
    // One finding per check kind is plenty for a tampered file.
    for (const ReplayFinding &f : report_.findings) {
      if (f.check == check) {
        return;
      }
    }
    report_.findings.push_back({tick, check, detail});
  }

  static bool close(double a, double b, double tol) {
    if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
  }

  static bool close(const Vec2 &a, const Vec2 &b, double tol) {
    return close(a.x, b.x, tol) && close(a.y, b.y, tol);
  }

 private:
  ReplayReport &report_;
};

std::string at_pursuer(std::size_t i, const std::string &what) {
  return "pursuer index " + std::to_string(i) + ": " + what;
}

}  // namespace

ReplayReport replay_verify(const TraceFile &file) {
  constexpr double kTol = 1e-9;
  ReplayReport report;
  Checker check(report);
  const SimTrace &tr = file.trace;
  if (tr.frames.empty()) {
    check.expect(false, 0, "nonempty", "trace has no frames");
    return report;
  }
  RunSetup setup;
  try {
    setup = make_setup(file.scenario, file.config);
  } catch (const Error &e) {
    check.expect(false, 0, "setup", e.what());
    return report;
  }
  const double dt = file.config.dt;
  const double d_c = file.config.capture.d_c;
  const std::size_t n = file.scenario.pursuers.size();

  for (std::size_t k = 0; k < tr.frames.size(); ++k) {
    const Frame &f = tr.frames[k];
    const long tick = static_cast<long>(k);
    const bool last = k + 1 == tr.frames.size();
    ++report.frames_checked;

    if (f.pursuers.size() != n) {
      check.expect(false, tick, "shape", "pursuer count differs from scenario");
      return report;
    }
    if (k == 0) {
      bool starts = f.evader == file.scenario.evader_position;
      for (std::size_t i = 0; i < n; ++i) {
        starts = starts && f.pursuers[i] == file.scenario.pursuers[i].position;
      }
      check.expect(starts && f.t == 0.0, tick, "initial_state",
                   "first frame does not match the scenario start");
    }

    Frame fresh;
    try {
      fresh = make_frame(f.t, f.pursuers, f.evader, setup);
    } catch (const Error &e) {
      check.expect(false, tick, "recompute", e.what());
      continue;
    }
    const FrameMetrics &m = f.metrics;
    const FrameMetrics &fm = fresh.metrics;
    bool metrics_ok = Checker::close(m.theta_g, fm.theta_g, kTol) &&
                      Checker::close(m.sum_r, fm.sum_r, kTol) &&
                      Checker::close(m.success_rate, fm.success_rate, kTol) &&
                      Checker::close(m.min_dist, fm.min_dist, kTol) &&
                      m.edge_lengths.size() == fm.edge_lengths.size();
    for (std::size_t e = 0; metrics_ok && e < m.edge_lengths.size(); ++e) {
      metrics_ok = Checker::close(m.edge_lengths[e], fm.edge_lengths[e], kTol);
    }
    check.expect(metrics_ok, tick, "metrics",
                 "stored metrics differ from values recomputed from positions");
    check.expect(f.ring.order == fresh.ring.order &&
                     Checker::close(f.ring.group_occupied,
                                    fresh.ring.group_occupied, kTol),
                 tick, "ring", "stored ring differs from recomputed ring");
    check.expect(m.theta_g <= kTwoPi + kTol, tick, "theta_G_bound",
                 "theta_G exceeds 2 pi");

    if (last) {
      check.expect(f.controls.empty(), tick, "shape",
                   "last frame must not carry controls");
      break;
    }
    if (f.controls.size() != n) {
      check.expect(false, tick, "shape", "control count differs from pursuers");
      continue;
    }

    std::vector<ControlState> expect_controls;
    try {
      expect_controls = compute_controls(f, setup);
    } catch (const Error &e) {
      check.expect(false, tick, "recompute", e.what());
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const ControlState &c = f.controls[i];
      const double vmax = setup.specs[i].max_speed;
      check.expect(Checker::close(c.v_total, expect_controls[i].v_total, kTol),
                   tick, "controls",
                   at_pursuer(i, "stored velocity differs from the control law"));
      check.expect(norm(c.v_total) <= vmax * (1.0 + 1e-12), tick, "speed_bound",
                   at_pursuer(i, "speed above its maximum"));
      const double scale = std::max(1.0, norm(c.v_surround) * norm(c.v_hunt));
      check.expect(std::abs(dot(c.v_surround, c.v_hunt)) <= 1e-12 * scale, tick,
                   "orthogonality",
                   at_pursuer(i, "surround and hunt components not orthogonal"));
    }
    check.expect(norm(f.evader_velocity) <=
                     file.scenario.evader.max_speed * (1.0 + 1e-12),
                 tick, "speed_bound", "evader speed above its maximum");

    const Frame &next = tr.frames[k + 1];
    const double h = next.t - f.t;
    const bool final_step = k + 2 == tr.frames.size();
    check.expect(h > 0.0 && (Checker::close(h, dt, kTol) || (final_step && h < dt)),
                 tick, "time_step", "time step differs from dt");
    check.expect(Checker::close(next.t, static_cast<double>(k + 1) * dt, kTol) ||
                     final_step,
                 tick, "time_step", "frame time is not tick * dt");
    for (std::size_t i = 0; i < n && i < next.pursuers.size(); ++i) {
      check.expect(Checker::close(next.pursuers[i],
                                  f.pursuers[i] + h * f.controls[i].v_total, kTol),
                   tick + 1, "kinematics",
                   at_pursuer(i, "position is not p + v dt from the previous frame"));
    }
    check.expect(Checker::close(next.evader, f.evader + h * f.evader_velocity, kTol),
                 tick + 1, "kinematics",
                 "evader position is not p + v dt from the previous frame");
    check.expect(last || f.metrics.min_dist > d_c, tick, "verdict",
                 "capture distance reached before the final frame");
  }

  const Frame &end = tr.frames.back();
  switch (tr.verdict.kind) {
    case VerdictKind::kCaptured:
      check.expect(end.metrics.min_dist <= d_c * (1.0 + kTol),
                   static_cast<long>(tr.frames.size()) - 1, "verdict",
                   "captured verdict but final distance above d_c");
      check.expect(Checker::close(tr.verdict.t_c, end.t, kTol),
                   static_cast<long>(tr.frames.size()) - 1, "verdict",
                   "capture time differs from the final frame time");
      break;
    case VerdictKind::kHorizonExceeded:
      check.expect(end.metrics.min_dist > d_c &&
                       end.t >= file.config.horizon - dt * 0.5,
                   static_cast<long>(tr.frames.size()) - 1, "verdict",
                   "horizon verdict inconsistent with the final frame");
      break;
    case VerdictKind::kRunning:
    case VerdictKind::kError:
      break;
  }
  return report;
}

}  // namespace pursuit
