#include "pursuit/session.hpp"

#include <cmath>

#include <json.hpp>

#include "pursuit/error.hpp"
#include "pursuit/geometry.hpp"

namespace pursuit {

using nlohmann::json;

namespace {

json vec(const Vec2 &v) { return json::array({v.x, v.y}); }

// Shortest round-trip doubles keep messages compact and replayable.
std::string line(const json &j) { return j.dump(); }

json command_json(const SteerCommand &c) {
  if (c.kind == SteerCommand::Kind::kStop) return {{"type", "stop"}};
  return {{"type", "steer"}, {"heading", c.heading}};
}

}  // namespace

ParsedClientMessage parse_client_message(std::string_view text) {
  ParsedClientMessage out;
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    out.error = "malformed message: expected a JSON object";
    return out;
  }
  const auto type = j.find("type");
  if (type == j.end() || !type->is_string()) {
    out.error = "malformed message: missing string field 'type'";
    return out;
  }
  const std::string t = type->get<std::string>();
  if (t == "steer") {
    const auto h = j.find("heading");
    if (h == j.end() || !h->is_number() || !std::isfinite(h->get<double>())) {
      out.error = "steer: 'heading' must be a finite number (radians)";
      return out;
    }
    out.message = SteerMsg{h->get<double>()};
  } else if (t == "stop") {
    out.message = StopMsg{};
  } else if (t == "pause") {
    out.message = PauseMsg{};
  } else if (t == "resume") {
    out.message = ResumeMsg{};
  } else if (t == "reset") {
    out.message = ResetMsg{};
  } else {
    out.error = "unknown message type '" + t + "'";
  }
  return out;
}

std::string encode_client_message(const ClientMessage &msg) {
  struct Visitor {
    json operator()(const SteerMsg &m) const {
      return {{"type", "steer"}, {"heading", m.heading}};
    }
    json operator()(const StopMsg &) const { return {{"type", "stop"}}; }
    json operator()(const PauseMsg &) const { return {{"type", "pause"}}; }
    json operator()(const ResumeMsg &) const { return {{"type", "resume"}}; }
    json operator()(const ResetMsg &) const { return {{"type", "reset"}}; }
  };
  return line(std::visit(Visitor{}, msg));
}

std::vector<EscapableArc> escapable_arcs(const Frame &frame,
                                         const RunSetup &setup) {
  const std::size_t n = frame.pursuers.size();
  if (n == 0) return {{0.0, kTwoPi}};
  if (frame.metrics.min_dist == 0.0) return {};
  std::vector<PolarCoord> polar(n);
  for (std::size_t i = 0; i < n; ++i) {
    polar[i] = to_local_polar(frame.pursuers[i], frame.evader);
  }
  std::vector<EscapableArc> arcs;
  if (n == 1) {
    const double th = setup.thetas[0];
    if (th < kTwoPi) {
      arcs.push_back({wrap_two_pi(polar[0].alpha + th / 2), kTwoPi - th});
    }
    return arcs;
  }
  const RingView &ring = frame.ring;
  for (std::size_t j = 0; j < ring.coverage.size(); ++j) {
    if (ring.coverage[j] <= 0.0) continue;
    const int a = ring.order[j];
    arcs.push_back({wrap_two_pi(polar[a].alpha + setup.thetas[a] / 2),
                    ring.coverage[j]});
  }
  return arcs;
}

std::string encode_hello(const ScenarioDoc &doc, const SimConfig &config,
                         const std::string &session_id, double pace) {
  json pursuers = json::array();
  for (const PursuerInit &p : doc.pursuers) {
    pursuers.push_back({{"id", p.id}, {"max_speed", p.max_speed}});
  }
  return line({{"type", "hello"},
               {"session", session_id},
               {"scenario", doc.name},
               {"pursuers", pursuers},
               {"evader_speed", doc.evader.max_speed},
               {"d_c", config.capture.d_c},
               {"dt", config.dt},
               {"horizon", config.horizon},
               {"mode", std::string(to_string(config.mode))},
               {"pace", pace}});
}

std::string encode_frame(const Frame &frame, long tick, const RunSetup &setup,
                         const std::vector<int> &ids,
                         const Vec2 &evader_velocity) {
  json pursuers = json::array();
  json disks = json::array();
  for (std::size_t i = 0; i < frame.pursuers.size(); ++i) {
    pursuers.push_back({{"id", ids[i]}, {"position", vec(frame.pursuers[i])}});
    const Vec2 local = frame.pursuers[i] - frame.evader;
    if (norm(local) > 0.0) {
      const ApolloniusDisk d = apollonius_disk(local, setup.lambdas[i]);
      disks.push_back({{"id", ids[i]},
                       {"center", vec(frame.evader + d.center)},
                       {"radius", d.radius}});
    }
  }
  json ring = json::array();
  for (int i : frame.ring.order) ring.push_back(ids[i]);
  json arcs = json::array();
  for (const EscapableArc &a : escapable_arcs(frame, setup)) {
    arcs.push_back({{"start", a.start}, {"extent", a.extent}});
  }
  return line({{"type", "frame"},
               {"tick", tick},
               {"t", frame.t},
               {"pursuers", pursuers},
               {"evader", vec(frame.evader)},
               {"evader_velocity", vec(evader_velocity)},
               {"theta_G", frame.metrics.theta_g},
               {"P", frame.metrics.success_rate},
               {"ring", ring},
               {"eps", frame.ring.coverage},
               {"arcs", arcs},
               {"disks", disks},
               {"min_dist", frame.metrics.min_dist}});
}

std::string encode_end(const Verdict &verdict) {
  return line({{"type", "end"},
               {"verdict", std::string(to_string(verdict.kind))},
               {"by", verdict.by},
               {"t_c", verdict.t_c},
               {"detail", verdict.detail}});
}

std::string encode_error(std::string_view reason) {
  return line({{"type", "error"}, {"reason", reason}});
}

std::string dump_command_log(const std::vector<LoggedCommand> &log) {
  json cmds = json::array();
  for (const LoggedCommand &c : log) {
    json j = command_json(c.command);
    j["tick"] = c.tick;
    cmds.push_back(j);
  }
  return json{{"commands", cmds}}.dump(1) + "\n";
}

std::vector<LoggedCommand> parse_command_log(std::string_view text) {
  const json root = json::parse(text, nullptr, false);
  if (root.is_discarded() || !root.is_object() || !root.contains("commands")) {
    throw Error(ErrorKind::kParse, "command log: expected {\"commands\": [...]}");
  }
  std::vector<LoggedCommand> out;
  try {
    for (const json &j : root.at("commands")) {
      LoggedCommand c;
      c.tick = j.at("tick").get<long>();
      const std::string type = j.at("type").get<std::string>();
      if (type == "steer") {
        c.command = SteerCommand::towards(j.at("heading").get<double>());
      } else if (type == "stop") {
        c.command = SteerCommand::stop();
      } else {
        throw Error(ErrorKind::kParse, "command log: unknown type " + type);
      }
      if (!out.empty() && c.tick < out.back().tick) {
        throw Error(ErrorKind::kParse, "command log: ticks out of order");
      }
      out.push_back(c);
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kParse, std::string("command log: ") + e.what());
  }
  return out;
}

SimTrace replay_command_log(const ScenarioDoc &doc, const SimConfig &config,
                            const std::vector<LoggedCommand> &log,
                            std::optional<std::size_t> max_frames) {
  Simulation sim(doc, config);
  std::size_t next = 0;
  while (!sim.finished()) {
    if (max_frames && sim.trace().frames.size() >= *max_frames) break;
    while (next < log.size() && log[next].tick <= sim.tick()) {
      sim.evader().command(log[next++].command);
    }
    sim.advance();
  }
  return sim.release_trace();
}

SessionCore::SessionCore(ScenarioDoc doc, SimConfig config,
                         std::string session_id, double pace)
    : doc_(std::move(doc)),
      config_(std::move(config)),
      session_id_(std::move(session_id)),
      pace_(pace),
      sim_(doc_, config_) {
  if (doc_.evader.strategy != EvaderStrategy::kExternal) {
    throw Error(ErrorKind::kValidation,
                "live session needs evader.strategy = external");
  }
  if (!(pace_ > 0.0)) throw Error(ErrorKind::kValidation, "pace must be > 0");
  for (const PursuerInit &p : doc_.pursuers) ids_.push_back(p.id);
}

void SessionCore::submit(ClientId client, ClientMessage msg) {
  std::lock_guard lock(inbound_mutex_);
  inbound_.emplace_back(client, std::move(msg));
}

std::string SessionCore::latest_frame_text() const {
  const SimTrace &tr = sim_.trace();
  const Vec2 v = tr.frames.size() >= 2 ? tr.frames[tr.frames.size() - 2].evader_velocity
                                       : Vec2{};
  return encode_frame(sim_.current(), sim_.tick(), sim_.setup(), ids_, v);
}

std::vector<std::string> SessionCore::join_snapshot() const {
  std::vector<std::string> out{encode_hello(doc_, config_, session_id_, pace_),
                               latest_frame_text()};
  if (sim_.finished()) out.push_back(encode_end(sim_.trace().verdict));
  return out;
}

std::vector<SessionCore::Outbound> SessionCore::tick() {
  std::deque<std::pair<ClientId, ClientMessage>> pending;
  {
    std::lock_guard lock(inbound_mutex_);
    pending.swap(inbound_);
  }

  std::vector<Outbound> out;
  auto apply = [this](const SteerCommand &cmd) {
    sim_.evader().command(cmd);
    log_.push_back({sim_.tick(), cmd});
  };

  for (auto &[client, msg] : pending) {
    if (std::holds_alternative<SteerMsg>(msg) ||
        std::holds_alternative<StopMsg>(msg)) {
      if (!owner_) owner_ = client;
      if (*owner_ != client) {
        out.push_back({client, encode_error(
                                   "steering is owned by another client; "
                                   "you are a spectator")});
        continue;
      }
      const SteerCommand cmd =
          std::holds_alternative<SteerMsg>(msg)
              ? SteerCommand::towards(std::get<SteerMsg>(msg).heading)
              : SteerCommand::stop();
      if (paused_) {
        buffered_ = cmd;
      } else {
        apply(cmd);
      }
    } else if (std::holds_alternative<PauseMsg>(msg)) {
      paused_ = true;
    } else if (std::holds_alternative<ResumeMsg>(msg)) {
      paused_ = false;
      if (buffered_) {
        apply(*buffered_);
        buffered_.reset();
      }
    } else if (std::holds_alternative<ResetMsg>(msg)) {
      sim_ = Simulation(doc_, config_);
      log_.clear();
      buffered_.reset();
      owner_.reset();
      paused_ = false;
      end_sent_ = false;
      for (std::string &s : join_snapshot()) out.push_back({{}, std::move(s)});
    }
  }

  if (!paused_ && !sim_.finished()) {
    sim_.advance();
    out.push_back({{}, latest_frame_text()});
  }
  if (sim_.finished() && !end_sent_) {
    end_sent_ = true;
    out.push_back({{}, encode_end(sim_.trace().verdict)});
  }
  return out;
}

}  // namespace pursuit
