#pragma once

#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pursuit/engine.hpp"
#include "pursuit/evader.hpp"
#include "pursuit/scenario.hpp"

namespace pursuit {

// Client -> server messages.
struct SteerMsg {
  double heading = 0.0;
};
struct StopMsg {};
struct PauseMsg {};
struct ResumeMsg {};
struct ResetMsg {};
using ClientMessage = std::variant<SteerMsg, StopMsg, PauseMsg, ResumeMsg, ResetMsg>;

// Either a message or a human-readable reason it was rejected.
struct ParsedClientMessage {
  std::optional<ClientMessage> message;
  std::string error;
};

// Single-line JSON object with a "type" field; unknown fields are ignored.
ParsedClientMessage parse_client_message(std::string_view line);
std::string encode_client_message(const ClientMessage &msg);

// Escapable gap between two adjacent occupied sectors, in world angles
// measured at the evader, counter-clockwise from `start`.
struct EscapableArc {
  double start = 0.0;
  double extent = 0.0;
};

std::vector<EscapableArc> escapable_arcs(const Frame &frame,
                                         const RunSetup &setup);

std::string encode_hello(const ScenarioDoc &doc, const SimConfig &config,
                         const std::string &session_id, double pace);
// `evader_velocity` is the velocity that carried the evader into `frame`.
std::string encode_frame(const Frame &frame, long tick, const RunSetup &setup,
                         const std::vector<int> &ids,
                         const Vec2 &evader_velocity);
std::string encode_end(const Verdict &verdict);
std::string encode_error(std::string_view reason);

// Steering input quantized to the tick it takes effect on.
struct LoggedCommand {
  long tick = 0;
  SteerCommand command;

  friend bool operator==(const LoggedCommand &, const LoggedCommand &) = default;
};

std::string dump_command_log(const std::vector<LoggedCommand> &log);
std::vector<LoggedCommand> parse_command_log(std::string_view text);

// Re-runs a scenario feeding logged commands at their tick indices. A live
// session cut short by disconnects is reproduced by passing its frame count.
SimTrace replay_command_log(const ScenarioDoc &doc, const SimConfig &config,
                            const std::vector<LoggedCommand> &log,
                            std::optional<std::size_t> max_frames = {});

// Network-free session state. Client threads call submit(); the loop that
// owns the engine calls tick(). Those two only share the inbound queue.
class SessionCore {
 public:
  using ClientId = std::uint64_t;

  struct Outbound {
    std::optional<ClientId> to;  // empty = broadcast
    std::string text;
  };

  // Requires an external evader.
  SessionCore(ScenarioDoc doc, SimConfig config, std::string session_id,
              double pace = 1.0);

  // Thread safe.
  void submit(ClientId client, ClientMessage msg);

  // Applies queued commands, then advances one tick unless paused or
  // finished. Returns the messages to deliver.
  std::vector<Outbound> tick();

  // Snapshot for a client joining now: hello plus the latest frame.
  std::vector<std::string> join_snapshot() const;

  const Simulation &simulation() const { return sim_; }
  const std::vector<LoggedCommand> &command_log() const { return log_; }
  bool paused() const { return paused_; }
  bool finished() const { return sim_.finished(); }
  std::optional<ClientId> steering_owner() const { return owner_; }
  const ScenarioDoc &scenario() const { return doc_; }
  const SimConfig &config() const { return config_; }
  double pace() const { return pace_; }

 private:
  std::string latest_frame_text() const;

  ScenarioDoc doc_;
  SimConfig config_;
  std::string session_id_;
  double pace_;
  Simulation sim_;
  std::vector<int> ids_;
  std::vector<LoggedCommand> log_;
  std::optional<SteerCommand> buffered_;
  std::optional<ClientId> owner_;
  bool paused_ = false;
  bool end_sent_ = false;

  std::mutex inbound_mutex_;
  std::deque<std::pair<ClientId, ClientMessage>> inbound_;
};

}  // namespace pursuit
