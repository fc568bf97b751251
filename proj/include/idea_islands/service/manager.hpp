#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <boost/asio/post.hpp>
#include <boost/asio/thread_pool.hpp>

#include "idea_islands/organizer/presets.hpp"
#include "idea_islands/service/session.hpp"

namespace idea_islands::service {

struct ServiceConfig {
  std::map<std::string, organizer::TopicConfig> topics;  // selectable by id
  std::string default_topic = "study2-sustainability";
  LayoutParams layout;
  TransitionMode transition = TransitionMode::Dive;
  organizer::OrganizerOptions organizer;
  std::optional<std::filesystem::path> log_dir;
  session_log::Durability durability = session_log::Durability::Fsync;
  std::size_t inference_threads = 4;

  static ServiceConfig with_presets() {
    ServiceConfig c;
    for (auto& t : organizer::presets::all()) c.topics.emplace(t.id, t);
    return c;
  }
};

// Owns every live session. Sessions share nothing but the inference pool.
class SessionManager {
 public:
  SessionManager(ServiceConfig config, std::shared_ptr<organizer::InferenceProvider> provider)
      : config_(std::move(config)), provider_(std::move(provider)), pool_(config_.inference_threads) {
    if (!config_.topics.contains(config_.default_topic))
      throw Error(ErrorCode::InvalidArgument, "default topic " + config_.default_topic + " is not configured");
    if (config_.log_dir) std::filesystem::create_directories(*config_.log_dir);
  }

  ~SessionManager() { pool_.join(); }

  std::shared_ptr<Session> create(const std::optional<std::string>& topic_id = std::nullopt,
                                  std::optional<TransitionMode> transition = std::nullopt) {
    const auto& topic_key = topic_id.value_or(config_.default_topic);
    const auto topic = config_.topics.find(topic_key);
    if (topic == config_.topics.end()) throw Error(ErrorCode::InvalidArgument, "unknown topic " + topic_key);

    std::lock_guard lock(mutex_);
    SessionConfig sc;
    sc.session_id = "s" + std::to_string(++counter_);
    sc.topic = topic->second;
    sc.layout = config_.layout;
    sc.transition = transition.value_or(config_.transition);
    sc.organizer = config_.organizer;
    sc.durability = config_.durability;
    sc.start_timestamp = utc_now();
    if (config_.log_dir) sc.log_path = *config_.log_dir / (sc.session_id + ".jsonl");
    auto executor = [this](std::function<void()> job) { boost::asio::post(pool_, std::move(job)); };
    auto session = Session::create(std::move(sc), provider_, {}, executor);
    sessions_.emplace(session->config().session_id, session);
    return session;
  }

  std::shared_ptr<Session> find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, id);
    return it->second;
  }

  std::vector<std::string> ids() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, s] : sessions_) out.push_back(id);
    return out;
  }

  void handle(const std::string& session_id, const ClientMessage& message, const Session::Sink& reply) {
    std::shared_ptr<Session> session;
    try {
      session = find(session_id);
    } catch (const Error& err) {
      reply(error_message(err.code(), err.detail(), message.ref));
      return;
    }
    session->handle(message, reply);
  }

  const ServiceConfig& config() const { return config_; }

 private:
  static std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  ServiceConfig config_;
  std::shared_ptr<organizer::InferenceProvider> provider_;
  boost::asio::thread_pool pool_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
};

}  // namespace idea_islands::service
