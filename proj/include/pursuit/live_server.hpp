#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "pursuit/engine.hpp"
#include "pursuit/scenario.hpp"
#include "pursuit/session.hpp"

namespace pursuit {

struct LiveOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 0;  // 0 picks a free port
  double pace = 1.0;        // wall seconds per simulated second
  // Hold the engine until the first client connects.
  bool wait_for_client = true;
  // End the session once every client has left.
  bool stop_when_empty = true;
  std::string session_id = "session-1";
};

// WebSocket host for one session. The engine runs on its own thread and
// talks to the network thread only through SessionCore's inbound queue and
// posted outbound messages.
class LiveServer {
 public:
  LiveServer(ScenarioDoc doc, SimConfig config, LiveOptions options);
  ~LiveServer();

  LiveServer(const LiveServer &) = delete;
  LiveServer &operator=(const LiveServer &) = delete;

  // Binds and starts both threads. Throws kIo when the port is taken.
  void start();
  unsigned short port() const;

  // Blocks until the session has ended and every connection is closed.
  void wait();
  // Ends the session early.
  void stop();

  // Valid after wait().
  const SessionCore &core() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pursuit
