#include "pursuit/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "pursuit/engine.hpp"
#include "pursuit/error.hpp"
#include "pursuit/live_server.hpp"
#include "pursuit/scenario.hpp"
#include "pursuit/session.hpp"
#include "pursuit/sweep.hpp"
#include "pursuit/trace_io.hpp"

namespace pursuit {

namespace {

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return kExitParse;
    case ErrorKind::kValidation: return kExitValidation;
    case ErrorKind::kIo: return kExitIo;
    case ErrorKind::kInvariantViolation: return kExitInvariant;
    default: return kExitDomain;
  }
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
}

// Flags shared by run and serve.
struct Overrides {
  std::optional<double> dt, horizon;
  std::optional<std::string> mode, evader;
  std::optional<std::uint64_t> seed;
  bool no_origin_term = false;

  void attach(CLI::App *cmd) {
    cmd->add_option("--dt", dt, "Time step (s)")->check(CLI::PositiveNumber);
    cmd->add_option("--horizon", horizon, "Simulation horizon (s)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--mode", mode, "Control mode")
        ->check(CLI::IsMember({"sp2", "sp5"}));
    cmd->add_option("--seed", seed, "Seed for random evaders");
    cmd->add_flag("--no-origin-term", no_origin_term,
                  "Drop the +p_e term of the flee law");
  }

  void apply(ScenarioDoc &doc) const {
    if (dt) doc.sim.dt = *dt;
    if (horizon) doc.sim.horizon = *horizon;
    if (mode) doc.sim.mode = *parse_control_mode(*mode);
    if (seed) doc.sim.seed = *seed;
    if (evader) doc.evader.strategy = *parse_evader_strategy(*evader);
    if (no_origin_term) doc.evader.origin_term = false;
    require_valid(doc);
  }
};

void print_certificate(std::ostream &out, const CaptureCertificate &c) {
  out << "certificate.edges_ok=" << c.cond_edges_ok << '\n'
      << "certificate.separation_ok=" << c.cond_separation_ok << '\n'
      << "certificate.radii_ok=" << c.cond_radii_ok << '\n'
      << "certificate.topology_ok=" << c.cond_topology_ok << '\n'
      << "certificate.evader_inside=" << c.evader_inside << '\n'
      << "certificate.guaranteed=" << (c.guaranteed ? "true" : "false") << '\n';
}

void print_summary(std::ostream &out, const ScenarioDoc &doc,
                   const SimTrace &tr) {
  const Frame &last = tr.frames.back();
  out << "scenario=" << doc.name << '\n'
      << "verdict=" << to_string(tr.verdict.kind) << '\n';
  if (tr.verdict.kind == VerdictKind::kCaptured) {
    out << "captured_by=" << tr.verdict.by << '\n'
        << "t_c=" << g9(tr.verdict.t_c) << '\n';
  }
  if (!tr.verdict.detail.empty()) out << "detail=" << tr.verdict.detail << '\n';
  out << "frames=" << tr.frames.size() << '\n'
      << "t_end=" << g9(last.t) << '\n'
      << "theta_G_end=" << g9(last.metrics.theta_g) << '\n'
      << "P_end=" << g9(last.metrics.success_rate) << '\n'
      << "min_dist_end=" << g9(last.metrics.min_dist) << '\n'
      << "events=" << tr.events.size() << '\n';
  if (tr.certificate) print_certificate(out, *tr.certificate);
}

TraceFormat format_for(const std::optional<std::string> &flag,
                       const std::string &path) {
  if (flag) return *parse_trace_format(*flag);
  return path.ends_with(".csv") ? TraceFormat::kColumnar
                                : TraceFormat::kStructured;
}

int cmd_run(const std::string &scenario, const Overrides &ov,
            const std::optional<std::string> &trace_path,
            const std::optional<std::string> &format,
            const std::optional<std::string> &commands, std::ostream &out) {
  ScenarioDoc doc = load_scenario(resolve_scenario_path(scenario));
  ov.apply(doc);
  const SimConfig config = config_from(doc);
  SimTrace tr;
  if (commands) {
    if (doc.evader.strategy != EvaderStrategy::kExternal) {
      throw Error(ErrorKind::kValidation,
                  "--commands needs an external evader (--evader external)");
    }
    tr = replay_command_log(doc, config, parse_command_log(read_file(*commands)));
  } else {
    tr = run(doc, config);
  }
  print_summary(out, doc, tr);
  if (trace_path) {
    save_trace({doc, config, tr}, *trace_path, format_for(format, *trace_path));
    out << "trace=" << *trace_path << '\n';
  }
  return tr.verdict.kind == VerdictKind::kError ? kExitDomain : kExitOk;
}

int cmd_check(const std::string &scenario, std::ostream &out) {
  ScenarioDoc doc = load_scenario(resolve_scenario_path(scenario));
  const SimConfig config = config_from(doc);
  const RunSetup setup = make_setup(doc, config);
  std::vector<Vec2> start;
  Vec2 centroid;
  for (const PursuerInit &p : doc.pursuers) {
    start.push_back(p.position);
    centroid = centroid + p.position;
  }
  centroid = (1.0 / static_cast<double>(start.size())) * centroid;
  double radius = 0.0;
  for (const Vec2 &p : start) radius = std::max(radius, distance(p, centroid));

  const Frame f0 = make_frame(0.0, start, doc.evader_position, setup);
  out << "scenario=" << doc.name << '\n'
      << "pursuers=" << start.size() << '\n'
      << "lambda_min=" << g9(config.capture.lambda_min) << '\n'
      << "theta_G=" << g9(f0.metrics.theta_g) << '\n'
      << "P=" << g9(f0.metrics.success_rate) << '\n'
      << "polygon_radius=" << g9(radius) << '\n';
  const PursuerCountBound bound =
      required_pursuer_count(doc.d_c, config.capture.lambda_min, radius);
  out << "count_bound=" << g9(bound.bound) << '\n'
      << "count_minimum=" << bound.minimum << '\n'
      << "count_vacuous=" << (bound.vacuous ? "true" : "false") << '\n'
      << "count_satisfied="
      << (static_cast<int>(start.size()) >= bound.minimum ? "true" : "false")
      << '\n';

  if (!doc.fields) {
    out << "certificate=not_applicable (scenario has no field parameters)\n";
    return kExitOk;
  }
  if (start.size() < 3) {
    out << "certificate=not_applicable (fewer than 3 pursuers)\n";
    return kExitOk;
  }
  std::vector<NeighborSets> sets(start.size());
  for (int i = 0; i < static_cast<int>(start.size()); ++i) {
    sets[i].omega = omega_of(setup, i, start);
    sets[i].polygon = setup.polygon[i];
  }
  print_certificate(out, theorem2_certificate(start, doc.evader_position,
                                              *doc.fields, config.capture, sets));
  return kExitOk;
}

int cmd_replay(const std::string &trace_path,
               const std::optional<std::string> &commands, std::ostream &out,
               std::ostream &err) {
  const TraceFile file = load_trace(trace_path);
  const ReplayReport report = replay_verify(file);
  out << "frames_checked=" << report.frames_checked << '\n'
      << "verdict=" << to_string(file.trace.verdict.kind) << '\n';
  bool ok = report.ok();
  for (const ReplayFinding &f : report.findings) {
    out << "violation tick=" << f.tick << " check=" << f.check << ": "
        << f.detail << '\n';
  }
  if (commands) {
    const SimTrace again =
        replay_command_log(file.scenario, file.config,
                           parse_command_log(read_file(*commands)),
                           file.trace.frames.size());
    const bool same = structured_text({file.scenario, file.config, again}) ==
                      structured_text(file);
    out << "command_log_reproduces=" << (same ? "true" : "false") << '\n';
    ok = ok && same;
  }
  out << "replay=" << (ok ? "ok" : "failed") << '\n';
  if (!ok) {
    err << "error: category=" << to_string(ErrorKind::kInvariantViolation)
        << " message=replay found " << report.findings.size()
        << " violation(s)\n";
    return kExitInvariant;
  }
  return kExitOk;
}

int cmd_sweep(const SweepGrid &grid, unsigned workers,
              const std::optional<std::string> &output, std::ostream &out) {
  const std::string table = sweep_table(run_sweep(grid, workers));
  if (output) {
    write_file(*output, table);
    out << "sweep=" << *output << '\n';
  } else {
    out << table;
  }
  return kExitOk;
}

int cmd_serve(const std::string &scenario, Overrides ov, LiveOptions options,
              const std::optional<std::string> &trace_path,
              const std::optional<std::string> &commands_path,
              std::ostream &out) {
  ScenarioDoc doc = load_scenario(resolve_scenario_path(scenario));
  // The human plays the evader.
  ov.evader = "external";
  ov.apply(doc);
  const SimConfig config = config_from(doc);
  LiveServer server(doc, config, options);
  server.start();
  out << "listening address=" << options.address << " port=" << server.port()
      << " session=" << options.session_id << std::endl;
  server.wait();
  const SessionCore &core = server.core();
  const SimTrace &tr = core.simulation().trace();
  print_summary(out, doc, tr);
  if (trace_path) {
    save_trace({doc, config, tr}, *trace_path, format_for({}, *trace_path));
    out << "trace=" << *trace_path << '\n';
  }
  if (commands_path) {
    write_file(*commands_path, dump_command_log(core.command_log()));
    out << "commands=" << *commands_path << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err) {
  CLI::App app{"Multi-pursuer encirclement simulator", "pursuit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  std::string scenario, trace_in;
  std::optional<std::string> trace_out, format, commands;
  Overrides ov;

  auto *run_cmd = app.add_subcommand("run", "Simulate a scenario");
  run_cmd->add_option("scenario", scenario, "Scenario file or bundled name")
      ->required();
  run_cmd->add_option("--trace", trace_out, "Write a trace (.csv or .json)");
  run_cmd->add_option("--format", format, "Trace format")
      ->check(CLI::IsMember({"csv", "json", "columnar", "structured"}));
  run_cmd->add_option("--evader", ov.evader, "Override the evader strategy")
      ->check(CLI::IsMember({"flee", "static", "scripted", "external", "random"}));
  run_cmd->add_option("--commands", commands,
                      "Feed a recorded command log to an external evader");
  ov.attach(run_cmd);

  auto *check_cmd =
      app.add_subcommand("check", "Capture certificate and pursuer-count bound");
  check_cmd->add_option("scenario", scenario, "Scenario file or bundled name")
      ->required();

  auto *replay_cmd =
      app.add_subcommand("replay", "Verify a structured trace");
  replay_cmd->add_option("trace", trace_in, "Structured trace")->required();
  replay_cmd->add_option("--commands", commands,
                         "Also check that this command log reproduces the trace");

  SweepGrid grid;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::string> sweep_out;
  auto *sweep_cmd =
      app.add_subcommand("sweep", "Capture rate over a speed-ratio x count grid");
  sweep_cmd->add_option("--lambdas", grid.lambdas, "Speed ratios")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  sweep_cmd->add_option("--counts", grid.counts, "Pursuer counts")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--trials", grid.trials, "Trials per cell")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", grid.seed, "Grid seed");
  sweep_cmd->add_option("--radius", grid.ring_radius, "Start ring radius")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--d-c", grid.d_c, "Capture distance")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--dt", grid.dt, "Time step")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--horizon", grid.horizon, "Horizon per trial")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--workers", workers, "Parallel workers")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--output", sweep_out, "Write the table to a file");

  LiveOptions live;
  std::optional<std::string> commands_out;
  Overrides serve_ov;
  auto *serve_cmd =
      app.add_subcommand("serve", "Host a live session with a human evader");
  serve_cmd->add_option("scenario", scenario, "Scenario file or bundled name")
      ->required();
  serve_cmd->add_option("--address", live.address, "Listen address");
  serve_cmd->add_option("--port", live.port, "Listen port (0 = any)");
  serve_cmd->add_option("--pace", live.pace, "Wall seconds per sim second")
      ->check(CLI::PositiveNumber);
  serve_cmd->add_option("--session", live.session_id, "Session id");
  serve_cmd->add_option("--trace", trace_out, "Write the session trace");
  serve_cmd->add_option("--commands", commands_out, "Write the command log");
  serve_ov.attach(serve_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(scenario, ov, trace_out, format, commands, out);
    if (*check_cmd) return cmd_check(scenario, out);
    if (*replay_cmd) return cmd_replay(trace_in, commands, out, err);
    if (*sweep_cmd) return cmd_sweep(grid, workers, sweep_out, out);
    if (*serve_cmd) {
      return cmd_serve(scenario, serve_ov, live, trace_out, commands_out, out);
    }
  } catch (const Error &e) {
    std::string msg = e.what();
    for (char &c : msg) {
      if (c == '\n') c = ' ';
    }
    err << "error: category=" << to_string(e.kind()) << " message=" << msg
        << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception &e) {
    err << "error: category=internal message=" << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace pursuit
