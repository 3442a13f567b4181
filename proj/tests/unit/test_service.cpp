// Copyright 2026 The Teleop Authors
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
#include <fstream>
#include <optional>
#include <thread>

#include "teleop/clock.hpp"
#include "teleop/protocol.hpp"
#include "teleop/service.hpp"
#include "test_support.hpp"

namespace teleop {
namespace {

namespace beast = boost::beast;
namespace net = boost::asio;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using namespace std::chrono_literals;
using protocol::Kind;
using protocol::WireMessage;

// Blocking client with a read timeout. A timed-out read leaves the stream unusable.
class Client {
 public:
  explicit Client(unsigned short port) : ws_(ioc_) {
    beast::get_lowest_layer(ws_).connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), port));
    ws_.handshake("127.0.0.1", "/ws");
  }

  std::optional<WireMessage> read(std::chrono::milliseconds timeout = 2000ms) {
    bool done = false;
    beast::error_code err;
    ws_.async_read(buf_, [&](beast::error_code ec, std::size_t) {
      done = true;
      err = ec;
    });
    ioc_.restart();
    ioc_.run_for(timeout);
    if (!done) {
      beast::get_lowest_layer(ws_).cancel();
      ioc_.restart();
      ioc_.run();
      return std::nullopt;
    }
    if (err) return std::nullopt;
    const std::string text = beast::buffers_to_string(buf_.data());
    buf_.consume(buf_.size());
    return protocol::decode(text);
  }

  // Skips messages until one of kind k arrives.
  std::optional<WireMessage> read_kind(Kind k, std::chrono::milliseconds timeout = 3000ms) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (std::chrono::steady_clock::now() < deadline) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      auto m = read(std::max(left, 1ms));
      if (!m) return std::nullopt;
      if (m->kind == k) return m;
    }
    return std::nullopt;
  }

  void send_raw(const std::string& text) { ws_.write(net::buffer(text)); }
  void send(std::uint64_t seq, const protocol::json& payload) {
    send_raw(protocol::encode({Kind::kLeaderInput, seq, payload}));
  }

 private:
  net::io_context ioc_;
  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buf_;
};

struct Rig {
  FollowerSetup setup = testing::follower_fixture("follower_dual.yaml");
  ManualClock clock;
  std::unique_ptr<Session> session;
  std::unique_ptr<Service> service;

  explicit Rig(std::optional<std::filesystem::path> static_dir = std::nullopt) {
    SessionOptions opts;
    opts.approach_duration = 0.2;
    opts.reset_duration = 0.2;
    TeleopPipeline pipeline(setup.model, setup.ik, setup.safety);
    auto leader = std::make_unique<ConsoleLeader>(LimbMapping::identity({"left", "right"}));
    session = std::make_unique<Session>(setup.model, setup.model->base_pose, std::move(pipeline), setup.actuator,
                                        std::move(leader), FeedbackConfig{}, clock, opts);
    ServiceConfig cfg;
    cfg.enabled = true;
    cfg.port = 0;
    cfg.state_rate = 50.0;
    cfg.static_dir = std::move(static_dir);
    service = std::make_unique<Service>(*session, cfg);
    service->start();
  }

  ~Rig() { service->stop(); }

  bool wait_for_inputs(std::uint64_t n) {
    for (int i = 0; i < 300; ++i) {
      if (service->stats().inputs >= n) return true;
      std::this_thread::sleep_for(10ms);
    }
    return false;
  }
};

TEST(Service, ModelInfoFirstThenGapFreeSequence) {
  Rig rig;
  Client c(rig.service->port());
  auto first = c.read();
  ASSERT_TRUE(first);
  EXPECT_EQ(first->kind, Kind::kModelInfo);
  EXPECT_EQ(first->seq, 1u);
  EXPECT_EQ(first->payload["limbs"].size(), 2u);
  std::uint64_t seq = first->seq;
  for (int i = 0; i < 10; ++i) {
    rig.session->tick();
    auto m = c.read();
    ASSERT_TRUE(m);
    EXPECT_EQ(m->seq, seq + 1);
    seq = m->seq;
  }
}

TEST(Service, StartInputDrivesTheSession) {
  Rig rig;
  Client c(rig.service->port());
  ASSERT_TRUE(c.read());
  while (rig.session->state() != SessionState::kWaitingForStart) rig.session->tick();
  c.send(1, {{"event", "start"}});
  ASSERT_TRUE(rig.wait_for_inputs(1));
  rig.session->tick();
  EXPECT_NE(rig.session->state(), SessionState::kWaitingForStart);
  bool saw_approach = false;
  for (int i = 0; i < 20 && !saw_approach; ++i) {
    auto e = c.read_kind(Kind::kSessionEvent);
    ASSERT_TRUE(e);
    saw_approach = e->payload["to"] == "Approaching";
  }
  EXPECT_TRUE(saw_approach);
}

TEST(Service, ErrorsGoOnlyToTheSender) {
  Rig rig;
  Client a(rig.service->port());
  Client b(rig.service->port());
  ASSERT_TRUE(a.read());
  ASSERT_TRUE(b.read());

  a.send_raw("{not json");
  auto e1 = a.read_kind(Kind::kError);
  ASSERT_TRUE(e1);
  EXPECT_TRUE(e1->payload["in_reply_to"].is_null());

  a.send_raw(protocol::encode({Kind::kStateUpdate, 5, protocol::json::object()}));
  auto e2 = a.read_kind(Kind::kError);
  ASSERT_TRUE(e2);
  EXPECT_EQ(e2->payload["in_reply_to"], 5);

  a.send(7, {{"event", "start"}});
  a.send(7, {{"event", "start"}});
  auto e3 = a.read_kind(Kind::kError);
  ASSERT_TRUE(e3);
  EXPECT_NE(e3->payload["message"].get<std::string>().find("seq must increase"), std::string::npos);

  a.send(8, {{"limb", "tail"}, {"delta_translation", {0, 0, 0.01}}});
  ASSERT_TRUE(a.read_kind(Kind::kError));

  EXPECT_EQ(rig.service->stats().errors_sent, 4u);
  EXPECT_FALSE(b.read_kind(Kind::kError, 400ms));
}

TEST(Service, ConsoleInputCannotBypassServerClamps) {
  Rig rig;
  Client c(rig.service->port());
  ASSERT_TRUE(c.read());
  const RobotModel& m = *rig.setup.model;
  while (rig.session->state() != SessionState::kWaitingForStart) rig.session->tick();
  std::uint64_t seq = 0;
  c.send(++seq, {{"event", "start"}});
  ASSERT_TRUE(rig.wait_for_inputs(seq));
  while (rig.session->state() != SessionState::kRunning) rig.session->tick();

  auto prev = rig.session->follower().state().q_actual;
  for (int k = 0; k < 30; ++k) {
    c.send(++seq, {{"limb", k % 2 ? "left" : "right"},
                   {"delta_translation", {5.0, -3.0, 10.0}},
                   {"delta_rotation_quat", {0.7071067811865476, 0, 0, 0.7071067811865476}}});
    ASSERT_TRUE(rig.wait_for_inputs(seq));
    rig.session->tick();
    const auto q = rig.session->follower().state().q_actual;
    for (std::size_t l = 0; l < m.limbs.size(); ++l) {
      const auto& chain = m.limbs[l];
      for (std::size_t j = 0; j < chain.dof(); ++j) {
        const auto& joint = chain.joints[j];
        EXPECT_LE(std::abs(q[l][j] - prev[l][j]),
                  rig.setup.safety.velocity_limits[l][j] * rig.setup.safety.dt * (1 + 1e-9) + 1e-12);
        EXPECT_GE(q[l][j], joint.lower - 1e-12);
        EXPECT_LE(q[l][j], joint.upper + 1e-12);
      }
    }
    prev = q;
  }
}

TEST(Service, PlainHttpIsNotFoundWithoutStaticDir) {
  Rig rig;
  net::io_context ioc;
  beast::tcp_stream s(ioc);
  s.connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), rig.service->port()));
  beast::http::request<beast::http::empty_body> req{beast::http::verb::get, "/index.html", 11};
  req.set(beast::http::field::host, "127.0.0.1");
  beast::http::write(s, req);
  beast::flat_buffer buf;
  beast::http::response<beast::http::string_body> res;
  beast::http::read(s, buf, res);
  EXPECT_EQ(res.result(), beast::http::status::not_found);
}

TEST(Service, ServesStaticFiles) {
  testing::TempDir dir;
  std::ofstream(dir / "index.html") << "<html>console</html>";
  Rig rig(dir.path());
  net::io_context ioc;
  beast::tcp_stream s(ioc);
  s.connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), rig.service->port()));
  beast::http::request<beast::http::empty_body> req{beast::http::verb::get, "/", 11};
  req.set(beast::http::field::host, "127.0.0.1");
  beast::http::write(s, req);
  beast::flat_buffer buf;
  beast::http::response<beast::http::string_body> res;
  beast::http::read(s, buf, res);
  EXPECT_EQ(res.result(), beast::http::status::ok);
  EXPECT_EQ(res.body(), "<html>console</html>");
}

TEST(Service, PortInUseThrows) {
  Rig rig;
  ServiceConfig cfg;
  cfg.enabled = true;
  cfg.port = rig.service->port();
  Service second(*rig.session, cfg);
  EXPECT_THROW(second.start(), Error);
}

TEST(Service, TracksConnections) {
  Rig rig;
  {
    Client c(rig.service->port());
    ASSERT_TRUE(c.read());
    EXPECT_EQ(rig.service->client_count(), 1u);
  }
  for (int i = 0; i < 100 && rig.service->client_count() > 0; ++i) {
    rig.session->tick();
    std::this_thread::sleep_for(10ms);
  }
  EXPECT_EQ(rig.service->client_count(), 0u);
  EXPECT_EQ(rig.service->stats().connections, 1u);
}

}  // namespace
}  // namespace teleop
