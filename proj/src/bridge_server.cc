// Copyright 2026 The Palmland Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <atomic>
#include <csignal>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <thread>
#include <variant>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "palmland/bridge.h"
#include "palmland/error.h"

namespace palmland {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

struct Connected {
  std::uint64_t id;
};
struct Received {
  std::uint64_t id;
  std::string text;
};
struct Disconnected {
  std::uint64_t id;
};
using Event = std::variant<Connected, Received, Disconnected>;

// Events from the network side, drained by the simulation thread between
// ticks.
class Inbox {
 public:
  void push(Event e) {
    std::lock_guard lock(mu_);
    events_.push_back(std::move(e));
  }
  std::deque<Event> take() {
    std::lock_guard lock(mu_);
    return std::exchange(events_, {});
  }

 private:
  std::mutex mu_;
  std::deque<Event> events_;
};

class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket socket, std::uint64_t id, Inbox& inbox,
               std::size_t max_queued)
      : ws_(std::move(socket)), id_(id), inbox_(inbox), max_queued_(max_queued) {}

  std::uint64_t id() const { return id_; }

  void accept(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->open_ = true;
      self->inbox_.push(Connected{self->id_});
      self->read();
    });
  }

  // Network thread only.
  void send(std::string text) {
    if (closed_) return;
    if (queue_.size() >= max_queued_) {
      // Too slow to keep up: drop the client rather than stall anyone.
      close();
      return;
    }
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) write();
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->finish();
        return;
      }
      self->inbox_.push(Received{self->id_, beast::buffers_to_string(self->buffer_.data())});
      self->buffer_.consume(self->buffer_.size());
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->close();
                        return;
                      }
                      self->queue_.pop_front();
                      if (!self->queue_.empty()) self->write();
                    });
  }

  void finish() {
    close();
    if (open_) {
      open_ = false;
      inbox_.push(Disconnected{id_});
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  std::uint64_t id_;
  Inbox& inbox_;
  std::size_t max_queued_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool open_ = false;
  bool closed_ = false;
};

}  // namespace

struct BridgeServer::Impl {
  Impl(const RunConfig& cfg, const ServeOptions& opts)
      : options(opts), session(cfg), acceptor(ioc) {
    if (!(options.time_scale > 0.0)) {
      throw ConfigError("time_scale", "must be > 0");
    }
    if (!(options.broadcast_rate > 0.0)) {
      throw ConfigError("broadcast_rate", "must be > 0");
    }
  }

  void do_accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      serve_http(std::make_shared<beast::tcp_stream>(std::move(socket)));
      do_accept();
    });
  }

  void serve_http(std::shared_ptr<beast::tcp_stream> stream) {
    auto buffer = std::make_shared<beast::flat_buffer>();
    auto req = std::make_shared<http::request<http::string_body>>();
    stream->expires_after(std::chrono::seconds(10));
    http::async_read(*stream, *buffer, *req,
                     [this, stream, buffer, req](beast::error_code ec, std::size_t) {
                       if (ec) return;
                       route(stream, std::move(*req));
                     });
  }

  void route(std::shared_ptr<beast::tcp_stream> stream,
             http::request<http::string_body> req) {
    if (websocket::is_upgrade(req)) {
      if (req.target() == "/ws") {
        stream->expires_never();
        auto conn = std::make_shared<WsConnection>(stream->release_socket(), next_id++,
                                                   inbox, options.max_queued);
        connections[conn->id()] = conn;
        conn->accept(std::move(req));
        return;
      }
    }
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req.version());
    res->keep_alive(false);
    res->set(http::field::content_type, "text/plain");
    if (req.method() == http::verb::get && req.target() == "/healthz") {
      res->result(http::status::ok);
      res->body() = "ok";
    } else {
      res->result(http::status::not_found);
      res->body() = "not found";
    }
    res->prepare_payload();
    http::async_write(*stream, *res, [stream, res](beast::error_code, std::size_t) {
      beast::error_code ec;
      stream->socket().shutdown(tcp::socket::shutdown_send, ec);
    });
  }

  // Network thread: deliver to one client or all of them.
  void deliver(std::optional<std::uint64_t> client, std::shared_ptr<const std::string> text) {
    for (auto it = connections.begin(); it != connections.end();) {
      auto conn = it->second.lock();
      if (!conn) {
        it = connections.erase(it);
        continue;
      }
      if (!client || *client == it->first) conn->send(*text);
      ++it;
    }
  }

  void post(Outgoing out) {
    auto text = std::make_shared<const std::string>(std::move(out.text));
    asio::post(ioc, [this, client = out.client, text] { deliver(client, text); });
  }

  void drain() {
    for (auto& e : inbox.take()) {
      if (auto* c = std::get_if<Connected>(&e)) {
        post(session.connect(c->id));
      } else if (auto* r = std::get_if<Received>(&e)) {
        post(session.handle(r->id, r->text));
      } else {
        session.disconnect(std::get<Disconnected>(e).id);
      }
    }
  }

  void sim_loop() {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const auto broadcast_every = std::chrono::duration<double>(1.0 / options.broadcast_rate);
    auto next_broadcast = start;
    const double dt = session.sim().physics_dt();
    // Bound the catch-up after a stall to a quarter second of sim time.
    const auto max_burst = static_cast<int>(std::ceil(0.25 / dt));
    while (running) {
      const auto now = clock::now();
      const double target =
          std::chrono::duration<double>(now - start).count() * options.time_scale;
      drain();
      for (int i = 0; i < max_burst && session.sim().time() + dt <= target; ++i) {
        try {
          session.step();
        } catch (const SimulationDiverged& e) {
          post({std::nullopt, nlohmann::json{{"v", kProtocolVersion},
                                             {"type", "err"},
                                             {"code", "diverged"},
                                             {"message", e.what()}}
                                  .dump()});
          running = false;
          break;
        }
        drain();
      }
      if (now >= next_broadcast) {
        post({std::nullopt, session.state().dump()});
        next_broadcast += std::chrono::duration_cast<clock::duration>(broadcast_every);
        if (next_broadcast < now) next_broadcast = now;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    std::lock_guard lock(done_mu);
    done = true;
    done_cv.notify_all();
  }

  ServeOptions options;
  LiveSession session;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  Inbox inbox;
  std::map<std::uint64_t, std::weak_ptr<WsConnection>> connections;
  asio::signal_set signals{ioc};
  std::uint64_t next_id = 1;
  unsigned short port = 0;
  std::atomic<bool> running{false};
  std::thread net_thread;
  std::thread sim_thread;
  std::mutex done_mu;
  std::condition_variable done_cv;
  bool done = false;
};

BridgeServer::BridgeServer(const RunConfig& cfg, const ServeOptions& options)
    : impl_(std::make_unique<Impl>(cfg, options)) {}

BridgeServer::~BridgeServer() { stop(); }

void BridgeServer::start() {
  Impl& m = *impl_;
  beast::error_code ec;
  const auto address = asio::ip::make_address(m.options.address, ec);
  if (ec) throw Error("bad bind address '" + m.options.address + "'");
  const tcp::endpoint endpoint(address, m.options.port);
  m.acceptor.open(endpoint.protocol(), ec);
  if (!ec) m.acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) m.acceptor.bind(endpoint, ec);
  if (!ec) m.acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) {
    throw Error("cannot bind " + m.options.address + ":" +
                std::to_string(m.options.port) + ": " + ec.message());
  }
  m.port = m.acceptor.local_endpoint().port();
  m.running = true;
  m.do_accept();
  if (m.options.handle_signals) {
    m.signals.add(SIGINT);
    m.signals.add(SIGTERM);
    m.signals.async_wait([&m](beast::error_code ec, int) {
      if (!ec) m.running = false;
    });
  }
  m.net_thread = std::thread([&m] {
    auto guard = asio::make_work_guard(m.ioc);
    m.ioc.run();
  });
  m.sim_thread = std::thread([&m] { m.sim_loop(); });
}

void BridgeServer::stop() {
  Impl& m = *impl_;
  m.running = false;
  if (m.sim_thread.joinable()) m.sim_thread.join();
  if (m.net_thread.joinable()) {
    asio::post(m.ioc, [&m] {
      beast::error_code ec;
      m.acceptor.close(ec);
      for (auto& [id, weak] : m.connections) {
        if (auto conn = weak.lock()) conn->close();
      }
      m.connections.clear();
      m.ioc.stop();
    });
    m.net_thread.join();
  }
  std::lock_guard lock(m.done_mu);
  m.done = true;
  m.done_cv.notify_all();
}

void BridgeServer::wait() {
  std::unique_lock lock(impl_->done_mu);
  impl_->done_cv.wait(lock, [this] { return impl_->done; });
}

unsigned short BridgeServer::port() const {
  return impl_->port;
}

}  // namespace palmland
