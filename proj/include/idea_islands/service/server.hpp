#pragma once

#include <deque>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "idea_islands/service/manager.hpp"

// HTTP + websocket front end on one port.
//
//   POST /sessions                    {"topic"?, "transition"?} -> {"session_id"}
//   GET  /sessions                    -> {"sessions": [...]}
//   GET  /sessions/{id}/snapshot      -> SceneSnapshot frame
//   GET  /sessions/{id}/metrics       -> {"report": {...}, "text": "..."}
//   POST /sessions/{id}/messages      client frame -> {"messages": [replies and deltas]}
//   GET  /sessions/{id}/stream        websocket: SceneSnapshot first, then frames
namespace idea_islands::service {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

struct ServerOptions {
  std::size_t subscriber_queue_limit = 1024;  // frames; beyond this a client is resynced
};

namespace detail {

inline std::vector<std::string> split_path(std::string_view target) {
  if (auto q = target.find('?'); q != std::string_view::npos) target = target.substr(0, q);
  std::vector<std::string> parts;
  while (!target.empty()) {
    if (target.front() == '/') {
      target.remove_prefix(1);
      continue;
    }
    const auto slash = target.find('/');
    parts.emplace_back(target.substr(0, slash));
    target = slash == std::string_view::npos ? std::string_view{} : target.substr(slash);
  }
  return parts;
}

inline std::uint64_t last_seq_of(const ServerMessage& m) {
  if (const auto* d = m.as<msg::SceneDelta>()) return d->events.empty() ? 0 : d->events.back().seq;
  if (const auto* s = m.as<msg::SceneSnapshot>()) return s->state.last_seq;
  return 0;
}

}  // namespace detail

// One websocket subscriber. All members are touched only on the stream's strand.
class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket&& socket, std::shared_ptr<Session> session, ServerOptions options)
      : ws_(std::move(socket)), session_(std::move(session)), options_(options) {}

  void run(http::request<http::string_body> request) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.text(true);
    ws_.async_accept(request, beast::bind_front_handler(&WsConnection::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    std::weak_ptr<WsConnection> weak = shared_from_this();
    auto executor = ws_.get_executor();
    auto sub = session_->subscribe([weak, executor](const ServerMessage& m) {
      net::post(executor, [weak, m] {
        if (auto self = weak.lock()) self->deliver_broadcast(m);
      });
    });
    subscription_ = sub.id;
    subscribed_ = true;
    enqueue(ServerMessage{msg::SceneSnapshot{std::move(sub.snapshot)}});
    do_read();
  }

  void deliver_broadcast(const ServerMessage& m) {
    const auto* delta = m.as<msg::SceneDelta>();
    if (!delta || delta->events.empty()) return;
    if (delta->events.back().seq <= last_seq_sent_) return;  // already covered by a snapshot
    if (delta->events.front().seq != last_seq_sent_ + 1 || outbox_.size() >= options_.subscriber_queue_limit) {
      resync();
      return;
    }
    enqueue(m);
  }

  // Drops whatever is queued (except a frame mid-write) and sends a fresh snapshot.
  void resync() {
    while (outbox_.size() > (writing_ ? 1u : 0u)) outbox_.pop_back();
    enqueue(ServerMessage{msg::SceneSnapshot{session_->snapshot()}});
  }

  void enqueue(const ServerMessage& m) {
    last_seq_sent_ = std::max(last_seq_sent_, detail::last_seq_of(m));
    outbox_.push_back(serialize(m));
    if (!writing_) write_next();
  }

  void write_next() {
    writing_ = true;
    ws_.async_write(net::buffer(outbox_.front()),
                    beast::bind_front_handler(&WsConnection::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    writing_ = false;
    if (ec) return close();
    outbox_.pop_front();
    if (!outbox_.empty()) write_next();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return close();
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    try {
      const auto message = parse_client_message(std::string_view(text));
      session_->handle(message, [this](const ServerMessage& reply) { enqueue(reply); });
    } catch (const Error& err) {
      enqueue(error_message(err.code(), err.detail()));
    }
    do_read();
  }

  void close() {
    if (subscribed_) session_->unsubscribe(subscription_);
    subscribed_ = false;
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::shared_ptr<Session> session_;
  ServerOptions options_;
  std::deque<std::string> outbox_;
  std::uint64_t last_seq_sent_ = 0;
  std::uint64_t subscription_ = 0;
  bool subscribed_ = false;
  bool writing_ = false;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket&& socket, SessionManager& manager, ServerOptions options)
      : stream_(std::move(socket)), manager_(manager), options_(options) {}

  void run() {
    net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpConnection::do_read, shared_from_this()));
  }

 private:
  using Response = http::response<http::string_body>;

  std::string_view target() const { return {request_.target().data(), request_.target().size()}; }

  void do_read() {
    request_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, request_,
                     beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) return shutdown();
    if (ec) return;

    if (websocket::is_upgrade(request_)) {
      const auto parts = detail::split_path(target());
      if (parts.size() == 3 && parts[0] == "sessions" && parts[2] == "stream") {
        try {
          auto session = manager_.find(parts[1]);
          stream_.expires_never();
          std::make_shared<WsConnection>(stream_.release_socket(), std::move(session), options_)
              ->run(std::move(request_));
          return;
        } catch (const Error& err) {
          return send(json_response(http::status::not_found, to_json(error_message(err.code(), err.detail()))));
        }
      }
      return send(json_response(http::status::not_found, {{"type", "Error"}, {"code", "NotFound"}, {"detail", ""}}));
    }
    send(route());
  }

  Response json_response(http::status status, const json& body) const {
    Response res{status, request_.version()};
    res.set(http::field::content_type, "application/json");
    res.keep_alive(request_.keep_alive());
    res.body() = body.dump();
    res.prepare_payload();
    return res;
  }

  Response route() {
    const auto parts = detail::split_path(target());
    const auto method = request_.method();
    try {
      if (parts.size() == 1 && parts[0] == "health") return json_response(http::status::ok, {{"status", "ok"}});
      if (parts.size() == 1 && parts[0] == "sessions") {
        if (method == http::verb::get) return json_response(http::status::ok, {{"sessions", manager_.ids()}});
        if (method == http::verb::post) return create_session();
      }
      if (parts.size() == 3 && parts[0] == "sessions") {
        auto session = manager_.find(parts[1]);
        if (parts[2] == "snapshot" && method == http::verb::get)
          return json_response(http::status::ok, to_json(ServerMessage{msg::SceneSnapshot{session->snapshot()}}));
        if (parts[2] == "metrics" && method == http::verb::get) {
          const auto report = session->metrics();
          return json_response(http::status::ok, {{"report", metrics::to_json(report)},
                                                  {"text", metrics::format_text(report)}});
        }
        if (parts[2] == "messages" && method == http::verb::post) return post_message(*session);
      }
      return json_response(http::status::not_found, {{"type", "Error"}, {"code", "NotFound"}, {"detail", std::string(target())}});
    } catch (const Error& err) {
      const auto status = err.code() == ErrorCode::UnknownSession ? http::status::not_found : http::status::bad_request;
      return json_response(status, to_json(error_message(err.code(), err.detail())));
    }
  }

  Response create_session() {
    std::optional<std::string> topic;
    std::optional<TransitionMode> transition;
    if (!request_.body().empty()) {
      json body;
      try {
        body = json::parse(request_.body());
      } catch (const json::exception& ex) {
        throw Error(ErrorCode::MalformedMessage, ex.what());
      }
      if (body.contains("topic")) topic = body.at("topic").get<std::string>();
      if (body.contains("transition")) transition = session_log::codec::transition(body.at("transition"));
    }
    auto session = manager_.create(topic, transition);
    return json_response(http::status::created, {{"session_id", session->config().session_id}});
  }

  // Non-streaming clients get the replies plus every delta produced while the
  // message was handled.
  Response post_message(Session& session) {
    const auto message = parse_client_message(std::string_view(request_.body()));
    json out = json::array();
    std::mutex collected_mutex;
    const auto sub = session.subscribe([&](const ServerMessage& m) {
      std::lock_guard lock(collected_mutex);
      out.push_back(to_json(m));
    });
    session.handle(message, [&](const ServerMessage& m) {
      std::lock_guard lock(collected_mutex);
      out.push_back(to_json(m));
    });
    session.unsubscribe(sub.id);
    std::lock_guard lock(collected_mutex);
    return json_response(http::status::ok, {{"messages", out}});
  }

  void send(Response response) {
    auto shared = std::make_shared<Response>(std::move(response));
    http::async_write(stream_, *shared,
                      [self = shared_from_this(), shared](beast::error_code ec, std::size_t) {
                        if (ec) return;
                        if (shared->need_eof()) return self->shutdown();
                        self->do_read();
                      });
  }

  void shutdown() {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  SessionManager& manager_;
  ServerOptions options_;
};

class Server {
 public:
  Server(SessionManager& manager, const std::string& address, unsigned short port, ServerOptions options = {})
      : manager_(manager), options_(options), acceptor_(net::make_strand(ioc_)) {
    const tcp::endpoint endpoint{net::ip::make_address(address), port};
    acceptor_.open(endpoint.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(endpoint);
    acceptor_.listen(net::socket_base::max_listen_connections);
    do_accept();
  }

  ~Server() { stop(); }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }

  // Runs the I/O loop on `threads` background threads.
  void start(int threads = 1) {
    for (int i = 0; i < threads; ++i) threads_.emplace_back([this] { ioc_.run(); });
  }

  // Runs the I/O loop on the calling thread too; returns after stop().
  void run(int threads = 1) {
    start(threads - 1);
    ioc_.run();
  }

  void stop() {
    ioc_.stop();
    for (auto& t : threads_)
      if (t.joinable()) t.join();
    threads_.clear();
  }

 private:
  void do_accept() {
    acceptor_.async_accept(net::make_strand(ioc_), [this](beast::error_code ec, tcp::socket socket) {
      if (!ec) std::make_shared<HttpConnection>(std::move(socket), manager_, options_)->run();
      if (acceptor_.is_open()) do_accept();
    });
  }

  SessionManager& manager_;
  ServerOptions options_;
  net::io_context ioc_;
  tcp::acceptor acceptor_;
  std::vector<std::thread> threads_;
};

}  // namespace idea_islands::service
