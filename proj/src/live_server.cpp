#include "pursuit/live_server.hpp"

#include <atomic>
#include <deque>
#include <map>
#include <optional>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "pursuit/error.hpp"

namespace pursuit {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

class Hub;

// One connected client. Lives on the network thread only.
class Client : public std::enable_shared_from_this<Client> {
 public:
  Client(tcp::socket socket, Hub &hub, SessionCore::ClientId id)
      : ws_(std::move(socket)), hub_(hub), id_(id) {}

  void start();
  void send(std::string text);
  void close();
  SessionCore::ClientId id() const { return id_; }

 private:
  void read();
  void write_next();
  void finish();

  websocket::stream<beast::tcp_stream> ws_;
  Hub &hub_;
  SessionCore::ClientId id_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool writing_ = false;
  bool closing_ = false;
  bool gone_ = false;
};

// Network-side state: client registry and cached snapshot for late joiners.
class Hub {
 public:
  Hub(net::io_context &ioc, SessionCore &core) : ioc_(ioc), core_(core) {}

  void joined(const std::shared_ptr<Client> &c) {
    clients_[c->id()] = c;
    ever_connected_ = true;
    ++connected_;
    c->send(hello_);
    if (!frame_.empty()) c->send(frame_);
    if (!end_.empty()) c->send(end_);
  }

  void left(SessionCore::ClientId id) {
    if (clients_.erase(id)) --connected_;
  }

  void received(SessionCore::ClientId id, const std::string &text) {
    ParsedClientMessage parsed = parse_client_message(text);
    if (!parsed.message) {
      if (auto it = clients_.find(id); it != clients_.end()) {
        it->second->send(encode_error(parsed.error));
      }
      return;
    }
    core_.submit(id, std::move(*parsed.message));
  }

  void deliver(std::vector<SessionCore::Outbound> out) {
    for (SessionCore::Outbound &m : out) {
      remember(m);
      if (m.to) {
        if (auto it = clients_.find(*m.to); it != clients_.end()) {
          it->second->send(m.text);
        }
      } else {
        for (auto &[id, c] : clients_) c->send(m.text);
      }
    }
  }

  void seed(std::vector<std::string> snapshot) {
    hello_ = snapshot.at(0);
    frame_ = snapshot.size() > 1 ? snapshot[1] : std::string();
  }

  void shutdown() {
    shutting_down_ = true;
    auto clients = clients_;
    for (auto &[id, c] : clients) c->close();
  }

  bool shutting_down() const { return shutting_down_; }
  std::atomic<int> connected_{0};
  std::atomic<bool> ever_connected_{false};

 private:
  void remember(const SessionCore::Outbound &m) {
    if (m.to) return;
    const auto type_at = m.text.find("\"type\":\"");
    if (type_at == std::string::npos) return;
    const std::string_view rest(m.text.data() + type_at + 8,
                                m.text.size() - type_at - 8);
    if (rest.starts_with("hello")) {
      hello_ = m.text;
      end_.clear();
    } else if (rest.starts_with("frame")) {
      frame_ = m.text;
    } else if (rest.starts_with("end")) {
      end_ = m.text;
    }
  }

  net::io_context &ioc_;
  SessionCore &core_;
  std::map<SessionCore::ClientId, std::shared_ptr<Client>> clients_;
  std::string hello_, frame_, end_;
  bool shutting_down_ = false;
};

void Client::start() {
  ws_.set_option(
      websocket::stream_base::timeout::suggested(beast::role_type::server));
  ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
    if (ec) return;
    if (self->hub_.shutting_down()) {
      self->close();
      return;
    }
    self->ws_.text(true);
    self->hub_.joined(self);
    self->read();
  });
}

void Client::read() {
  ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec,
                                                      std::size_t) {
    if (ec) {
      self->finish();
      return;
    }
    const std::string text = beast::buffers_to_string(self->buffer_.data());
    self->buffer_.consume(self->buffer_.size());
    self->hub_.received(self->id_, text);
    self->read();
  });
}

void Client::send(std::string text) {
  if (gone_ || closing_) return;
  queue_.push_back(std::move(text));
  if (!writing_) write_next();
}

void Client::write_next() {
  if (queue_.empty()) {
    writing_ = false;
    if (closing_) close();
    return;
  }
  writing_ = true;
  ws_.async_write(net::buffer(queue_.front()),
                  [self = shared_from_this()](beast::error_code ec, std::size_t) {
                    if (ec) {
                      self->finish();
                      return;
                    }
                    self->queue_.pop_front();
                    self->write_next();
                  });
}

void Client::close() {
  closing_ = true;
  if (writing_ || gone_) return;
  gone_ = true;
  ws_.async_close(websocket::close_code::normal,
                  [self = shared_from_this()](beast::error_code) {
                    self->hub_.left(self->id_);
                  });
}

void Client::finish() {
  gone_ = true;
  hub_.left(id_);
}

}  // namespace

struct LiveServer::Impl {
  Impl(ScenarioDoc doc, SimConfig config, LiveOptions opts)
      : options(std::move(opts)),
        core(std::move(doc), std::move(config), options.session_id,
             options.pace),
        hub(ioc, core),
        acceptor(ioc),
        guard(net::make_work_guard(ioc)) {}

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      std::make_shared<Client>(std::move(socket), hub, ++next_id)->start();
      accept();
    });
  }

  void engine_loop() {
    using clock = std::chrono::steady_clock;
    const auto interval = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(core.config().dt * options.pace));
    while (options.wait_for_client && !hub.ever_connected_ && !stop_flag) {
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    auto next = clock::now();
    while (!stop_flag) {
      auto out = core.tick();
      net::post(ioc, [this, out = std::move(out)]() mutable {
        hub.deliver(std::move(out));
      });
      if (core.finished()) break;
      if (options.stop_when_empty && hub.ever_connected_ && hub.connected_ == 0) {
        break;
      }
      next += interval;
      std::this_thread::sleep_until(next);
    }
    net::post(ioc, [this] {
      beast::error_code ignored;
      acceptor.close(ignored);
      hub.shutdown();
      guard.reset();
      // Stragglers that never finish the close handshake.
      deadline = std::make_unique<net::steady_timer>(ioc, std::chrono::seconds(2));
      deadline->async_wait([this](beast::error_code ec) {
        if (!ec) ioc.stop();
      });
      watch_empty();
    });
  }

  void watch_empty() {
    if (hub.connected_ == 0) {
      if (deadline) deadline->cancel();
      return;
    }
    poll = std::make_unique<net::steady_timer>(ioc, std::chrono::milliseconds(10));
    poll->async_wait([this](beast::error_code ec) {
      if (!ec) watch_empty();
    });
  }

  LiveOptions options;
  net::io_context ioc;
  SessionCore core;
  Hub hub;
  tcp::acceptor acceptor;
  net::executor_work_guard<net::io_context::executor_type> guard;
  std::unique_ptr<net::steady_timer> deadline, poll;
  SessionCore::ClientId next_id = 0;
  std::atomic<bool> stop_flag{false};
  std::thread io_thread, engine_thread;
  bool started = false;
  unsigned short bound_port = 0;
};

LiveServer::LiveServer(ScenarioDoc doc, SimConfig config, LiveOptions options)
    : impl_(std::make_unique<Impl>(std::move(doc), std::move(config),
                                   std::move(options))) {}

LiveServer::~LiveServer() {
  if (impl_ && impl_->started) {
    stop();
    wait();
  }
}

void LiveServer::start() {
  Impl &s = *impl_;
  beast::error_code ec;
  const auto address = net::ip::make_address(s.options.address, ec);
  if (ec) throw Error(ErrorKind::kValidation, "bad address " + s.options.address);
  const tcp::endpoint endpoint(address, s.options.port);
  s.acceptor.open(endpoint.protocol(), ec);
  if (!ec) s.acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) s.acceptor.bind(endpoint, ec);
  if (!ec) s.acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    throw Error(ErrorKind::kIo, "cannot listen on " + s.options.address + ":" +
                                    std::to_string(s.options.port) + ": " +
                                    ec.message());
  }
  s.bound_port = s.acceptor.local_endpoint().port();
  s.hub.seed(s.core.join_snapshot());
  s.accept();
  s.started = true;
  s.io_thread = std::thread([&s] { s.ioc.run(); });
  s.engine_thread = std::thread([&s] { s.engine_loop(); });
}

unsigned short LiveServer::port() const { return impl_->bound_port; }

void LiveServer::wait() {
  Impl &s = *impl_;
  if (s.engine_thread.joinable()) s.engine_thread.join();
  if (s.io_thread.joinable()) s.io_thread.join();
}

void LiveServer::stop() { impl_->stop_flag = true; }

const SessionCore &LiveServer::core() const { return impl_->core; }

}  // namespace pursuit
