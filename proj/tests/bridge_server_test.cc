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


#include <gtest/gtest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <memory>
#include <string>
#include <thread>

#include "palmland/bridge.h"
#include "palmland/error.h"

namespace palmland {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using asio::ip::tcp;
using nlohmann::json;

RunConfig serve_config() {
  RunConfig cfg;
  cfg.scenario = "approach_static";
  return cfg;
}

ServeOptions fast_options() {
  ServeOptions o;
  o.port = 0;
  o.time_scale = 4.0;
  return o;
}

http::response<http::string_body> get(unsigned short port, const std::string& target) {
  asio::io_context ioc;
  beast::tcp_stream stream(ioc);
  stream.connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port));
  http::request<http::empty_body> req{http::verb::get, target, 11};
  req.set(http::field::host, "127.0.0.1");
  http::write(stream, req);
  beast::flat_buffer buffer;
  http::response<http::string_body> res;
  http::read(stream, buffer, res);
  beast::error_code ec;
  stream.socket().shutdown(tcp::socket::shutdown_both, ec);
  return res;
}

class Client {
 public:
  explicit Client(unsigned short port) : ws_(ioc_) {
    beast::get_lowest_layer(ws_).connect(
        tcp::endpoint(asio::ip::make_address("127.0.0.1"), port));
    ws_.handshake("127.0.0.1", "/ws");
  }
  ~Client() {
    beast::error_code ec;
    ws_.close(websocket::close_code::normal, ec);
  }

  json read() {
    beast::flat_buffer buffer;
    ws_.read(buffer);
    return json::parse(beast::buffers_to_string(buffer.data()));
  }

  // Next message that is not a state broadcast.
  json reply() {
    for (;;) {
      json m = read();
      if (m["type"] != "state") return m;
    }
  }

  json next_state() {
    for (;;) {
      json m = read();
      if (m["type"] == "state") return m;
    }
  }

  void send(const std::string& text) { ws_.write(asio::buffer(text)); }

 private:
  asio::io_context ioc_;
  websocket::stream<beast::tcp_stream> ws_;
};

TEST(BridgeServerTest, HealthzAndNotFound) {
  BridgeServer server(serve_config(), fast_options());
  server.start();
  ASSERT_NE(server.port(), 0);
  const auto ok = get(server.port(), "/healthz");
  EXPECT_EQ(ok.result(), http::status::ok);
  EXPECT_EQ(ok.body(), "ok");
  EXPECT_NE(std::string(ok[http::field::content_type]).find("text/plain"), std::string::npos);
  EXPECT_EQ(get(server.port(), "/nope").result(), http::status::not_found);
  EXPECT_EQ(get(server.port(), "/ws").result(), http::status::not_found);
  server.stop();
}

TEST(BridgeServerTest, HelloRolesAndBroadcasts) {
  BridgeServer server(serve_config(), fast_options());
  server.start();
  Client a(server.port());
  const json hello = a.reply();
  EXPECT_EQ(hello["cmd"], "hello");
  EXPECT_EQ(hello["role"], "controller");
  Client b(server.port());
  EXPECT_EQ(b.reply()["role"], "observer");

  const auto start = std::chrono::steady_clock::now();
  double last_t = -1.0;
  int frames = 0;
  while (frames < 15) {
    const json st = a.next_state();
    EXPECT_EQ(st["v"], 1);
    EXPECT_GT(st["t"].get<double>(), last_t);
    last_t = st["t"].get<double>();
    ++frames;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // 15 frames at 30 Hz take about half a second of wall time.
  EXPECT_GT(wall, 0.25);
  EXPECT_LT(wall, 2.0);
  EXPECT_EQ(b.next_state()["type"], "state");
  server.stop();
}

TEST(BridgeServerTest, CommandsGetAcksAndErrors) {
  BridgeServer server(serve_config(), fast_options());
  server.start();
  Client a(server.port());
  a.reply();
  Client b(server.port());
  b.reply();

  a.send("this is not json");
  const json bad = a.reply();
  EXPECT_EQ(bad["type"], "err");
  EXPECT_EQ(bad["code"], "malformed");

  // The connection survives a malformed message.
  a.send(R"({"v":1,"type":"cmd","id":9,"cmd":"set_param","key":"k_prime","value":0.9})");
  const json rejected = a.reply();
  EXPECT_EQ(rejected["code"], "invalid_param");
  EXPECT_EQ(rejected["id"], 9);

  a.send(R"({"v":1,"type":"cmd","id":10,"cmd":"set_param","key":"k_prime","value":0.25})");
  const json ok = a.reply();
  EXPECT_EQ(ok["type"], "ack");
  EXPECT_EQ(ok["id"], 10);
  for (int i = 0; i < 30; ++i) {
    if (a.next_state()["params"]["k_prime"] == 0.25) break;
    ASSERT_LT(i, 29) << "parameter never applied";
  }

  b.send(R"({"v":1,"type":"cmd","cmd":"set_palm_mode","mode":"STRETCH"})");
  EXPECT_EQ(b.reply()["code"], "read_only");
  server.stop();
}

TEST(BridgeServerTest, ControllerLossFallsBackToStay) {
  BridgeServer server(serve_config(), fast_options());
  server.start();
  auto driver = std::make_unique<Client>(server.port());
  EXPECT_EQ(driver->reply()["role"], "controller");
  Client watcher(server.port());
  EXPECT_EQ(watcher.reply()["role"], "observer");
  EXPECT_TRUE(watcher.next_state()["controller"].get<bool>());
  driver.reset();
  json st;
  for (int i = 0; i < 60; ++i) {
    st = watcher.next_state();
    if (st["user"]["manual"].get<bool>()) break;
  }
  EXPECT_FALSE(st["controller"].get<bool>());
  EXPECT_TRUE(st["user"]["manual"].get<bool>());
  EXPECT_EQ(st["user"]["palm_mode"], "BEND");
  EXPECT_EQ(st["gesture"], "STAY");
  // The remaining observer stays read-only.
  watcher.send(R"({"v":1,"type":"cmd","cmd":"mission","action":"reset"})");
  EXPECT_EQ(watcher.reply()["code"], "read_only");
  server.stop();
}

TEST(BridgeServerTest, BindFailureThrows) {
  BridgeServer first(serve_config(), fast_options());
  first.start();
  ServeOptions taken = fast_options();
  taken.port = first.port();
  BridgeServer second(serve_config(), taken);
  EXPECT_THROW(second.start(), Error);
  first.stop();
  first.stop();
}

TEST(BridgeServerTest, WaitReturnsAfterStop) {
  BridgeServer server(serve_config(), fast_options());
  server.start();
  std::thread stopper([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  });
  server.wait();
  stopper.join();
  SUCCEED();
}

}  // namespace
}  // namespace palmland
