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

#include "teleop/service.hpp"

#include <deque>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "teleop/protocol.hpp"

namespace teleop {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using protocol::json;
using protocol::Kind;

namespace {

constexpr std::size_t kMaxControlQueue = 256;

std::string content_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

class WsSession;

}  // namespace

struct Service::Impl {
  Impl(EngineView& e, ServiceConfig c) : engine(e), cfg(std::move(c)), state_timer(ioc), feedback_timer(ioc) {}

  EngineView& engine;
  ServiceConfig cfg;
  net::io_context ioc;
  std::optional<tcp::acceptor> acceptor;
  std::thread thread;
  net::steady_timer state_timer;
  net::steady_timer feedback_timer;
  unsigned short bound_port = 0;

  mutable std::mutex conns_mutex;
  std::vector<std::weak_ptr<WsSession>> conns;

  std::uint64_t last_feedback_version = 0;
  std::size_t next_event = 0;

  std::atomic<std::uint64_t> connections{0};
  std::atomic<std::uint64_t> inputs{0};
  std::atomic<std::uint64_t> errors_sent{0};
  std::atomic<std::uint64_t> dropped{0};

  void do_accept();
  void schedule_state(net::steady_timer::time_point at);
  void schedule_feedback(net::steady_timer::time_point at);
  void add(const std::shared_ptr<WsSession>& s);
  std::vector<std::shared_ptr<WsSession>> live();
};

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(Service::Impl& svc, tcp::socket socket) : svc_(svc), ws_(std::move(socket)) {}

  void accept(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->send_control(Kind::kModelInfo, protocol::model_info(self->svc_.engine.model()));
      self->svc_.add(self);
      self->read();
    });
  }

  void send_control(Kind kind, json payload) {
    control_.emplace_back(kind, std::move(payload));
    if (control_.size() > kMaxControlQueue) control_.pop_front();
    pump();
  }

  void set_state(const json& payload) {
    if (state_) ++svc_.dropped;
    state_ = payload;
    pump();
  }

  void set_feedback(const json& payload) {
    feedback_ = payload;
    pump();
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void send_error(const std::string& message, std::optional<std::uint64_t> reply_to) {
    ++svc_.errors_sent;
    send_control(Kind::kError, protocol::error_payload(message, reply_to));
  }

  void pump() {
    if (writing_ || closed_) return;
    protocol::WireMessage m;
    if (!control_.empty()) {
      m.kind = control_.front().first;
      m.payload = std::move(control_.front().second);
      control_.pop_front();
    } else if (state_) {
      m.kind = Kind::kStateUpdate;
      m.payload = std::move(*state_);
      state_.reset();
    } else if (feedback_) {
      m.kind = Kind::kFeedbackUpdate;
      m.payload = std::move(*feedback_);
      feedback_.reset();
    } else {
      return;
    }
    m.seq = ++out_seq_;
    out_ = protocol::encode(m);
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(out_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->writing_ = false;
      if (ec) {
        self->close();
        return;
      }
      self->pump();
    });
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->handle(text);
      self->read();
    });
  }

  void handle(const std::string& text) {
    protocol::WireMessage m;
    try {
      m = protocol::decode(text);
    } catch (const protocol::ProtocolError& e) {
      send_error(e.what(), std::nullopt);
      return;
    }
    if (m.kind != Kind::kLeaderInput) {
      send_error("clients may only send leader_input", m.seq);
      return;
    }
    if (in_seq_ && m.seq <= *in_seq_) {
      send_error("seq must increase, last was " + std::to_string(*in_seq_), m.seq);
      return;
    }
    in_seq_ = m.seq;
    ConsoleLeader* console = svc_.engine.console();
    if (!console) {
      send_error("no console leader configured", m.seq);
      return;
    }
    try {
      console->push(protocol::parse_leader_input(m.payload));
      ++svc_.inputs;
    } catch (const std::exception& e) {
      send_error(e.what(), m.seq);
    }
  }

  Service::Impl& svc_;
  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::pair<Kind, json>> control_;
  std::optional<json> state_;
  std::optional<json> feedback_;
  std::string out_;
  std::uint64_t out_seq_ = 0;
  std::optional<std::uint64_t> in_seq_;
  bool writing_ = false;
  bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(Service::Impl& svc, tcp::socket socket) : svc_(svc), stream_(std::move(socket)) {}

  void run() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->dispatch();
    });
  }

 private:
  void dispatch() {
    if (websocket::is_upgrade(req_)) {
      if (req_.target() != "/ws") {
        respond(http::status::not_found, "text/plain", "websocket endpoint is /ws\n");
        return;
      }
      stream_.expires_never();
      std::make_shared<WsSession>(svc_, stream_.release_socket())->accept(std::move(req_));
      return;
    }
    if (req_.method() != http::verb::get || !svc_.cfg.static_dir) {
      respond(http::status::not_found, "text/plain", "not found\n");
      return;
    }
    std::string target(req_.target());
    if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (target.empty() || target == "/") target = "/index.html";
    if (target.find("..") != std::string::npos) {
      respond(http::status::bad_request, "text/plain", "bad path\n");
      return;
    }
    const auto path = *svc_.cfg.static_dir / target.substr(1);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      respond(http::status::not_found, "text/plain", "not found\n");
      return;
    }
    std::ostringstream body;
    body << in.rdbuf();
    respond(http::status::ok, content_type(path), body.str());
  }

  void respond(http::status status, const std::string& type, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
    res->set(http::field::content_type, type);
    res->keep_alive(false);
    res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ec;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    });
  }

  Service::Impl& svc_;
  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

void Service::Impl::add(const std::shared_ptr<WsSession>& s) {
  std::lock_guard lock(conns_mutex);
  conns.push_back(s);
  ++connections;
}

std::vector<std::shared_ptr<WsSession>> Service::Impl::live() {
  std::lock_guard lock(conns_mutex);
  std::vector<std::shared_ptr<WsSession>> out;
  std::vector<std::weak_ptr<WsSession>> keep;
  for (auto& w : conns) {
    if (auto s = w.lock()) {
      out.push_back(s);
      keep.push_back(w);
    }
  }
  conns = std::move(keep);
  return out;
}

void Service::Impl::do_accept() {
  acceptor->async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec == net::error::operation_aborted) return;
    if (!ec) std::make_shared<HttpSession>(*this, std::move(socket))->run();
    do_accept();
  });
}

void Service::Impl::schedule_state(net::steady_timer::time_point at) {
  state_timer.expires_at(at);
  state_timer.async_wait([this, at](beast::error_code ec) {
    if (ec) return;
    const auto sessions = live();
    for (const auto& e : engine.events_since(next_event)) {
      ++next_event;
      const json payload = protocol::session_event(e);
      for (const auto& s : sessions) s->send_control(Kind::kSessionEvent, payload);
    }
    if (const auto snap = engine.engine_snapshot(); snap && !sessions.empty()) {
      const json payload = protocol::state_update(*snap, engine.model());
      for (const auto& s : sessions) s->set_state(payload);
    }
    const auto period = std::chrono::duration_cast<net::steady_timer::duration>(
        std::chrono::duration<double>(1.0 / cfg.state_rate));
    auto next = at + period;
    const auto now = net::steady_timer::clock_type::now();
    if (next < now) next = now;
    schedule_state(next);
  });
}

void Service::Impl::schedule_feedback(net::steady_timer::time_point at) {
  feedback_timer.expires_at(at);
  feedback_timer.async_wait([this, at](beast::error_code ec) {
    if (ec) return;
    const auto version = engine.feedback_version();
    if (version != last_feedback_version) {
      last_feedback_version = version;
      if (const auto f = engine.feedback_snapshot()) {
        const json payload = protocol::feedback_update(*f);
        for (const auto& s : live()) s->set_feedback(payload);
      }
    }
    const auto period = std::chrono::duration_cast<net::steady_timer::duration>(
        std::chrono::duration<double>(1.0 / cfg.feedback_rate_cap));
    auto next = at + period;
    const auto now = net::steady_timer::clock_type::now();
    if (next < now) next = now;
    schedule_feedback(next);
  });
}

Service::Service(EngineView& engine, ServiceConfig config) : impl_(std::make_unique<Impl>(engine, std::move(config))) {
  if (!(impl_->cfg.state_rate > 0.0) || !(impl_->cfg.feedback_rate_cap > 0.0)) {
    throw ConfigError("service: rates must be positive");
  }
}

Service::~Service() { stop(); }

void Service::start() {
  if (impl_->thread.joinable()) return;
  beast::error_code ec;
  const auto address = net::ip::make_address(impl_->cfg.bind, ec);
  if (ec) throw Error("service: bad bind address '" + impl_->cfg.bind + "'");
  const tcp::endpoint endpoint(address, impl_->cfg.port);
  tcp::acceptor acceptor(impl_->ioc);
  acceptor.open(endpoint.protocol(), ec);
  if (!ec) acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) acceptor.bind(endpoint, ec);
  if (!ec) acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    throw Error("service: cannot bind " + impl_->cfg.bind + ":" + std::to_string(impl_->cfg.port) + ": " + ec.message());
  }
  impl_->bound_port = acceptor.local_endpoint().port();
  impl_->acceptor.emplace(std::move(acceptor));
  impl_->next_event = impl_->engine.events_since(0).size();
  impl_->do_accept();
  const auto now = net::steady_timer::clock_type::now();
  impl_->schedule_state(now);
  impl_->schedule_feedback(now);
  impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

void Service::stop() {
  if (!impl_->thread.joinable()) return;
  net::post(impl_->ioc, [this] {
    beast::error_code ec;
    impl_->acceptor->close(ec);
    impl_->state_timer.cancel();
    impl_->feedback_timer.cancel();
    for (const auto& s : impl_->live()) s->close();
  });
  net::post(impl_->ioc, [this] { impl_->ioc.stop(); });
  impl_->thread.join();
}

unsigned short Service::port() const { return impl_->bound_port; }

std::size_t Service::client_count() const {
  std::lock_guard lock(impl_->conns_mutex);
  std::size_t n = 0;
  for (const auto& w : impl_->conns) n += w.expired() ? 0 : 1;
  return n;
}

ServiceStats Service::stats() const {
  return {impl_->connections.load(), impl_->inputs.load(), impl_->errors_sent.load(), impl_->dropped.load()};
}

}  // namespace teleop
