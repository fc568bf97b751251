#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "idea_islands/metrics.hpp"
#include "idea_islands/navigation.hpp"
#include "idea_islands/organizer/organize.hpp"
#include "idea_islands/service/protocol.hpp"
#include "idea_islands/session_log.hpp"

namespace idea_islands::service {

struct SessionConfig {
  std::string session_id = "session";
  organizer::TopicConfig topic;
  LayoutParams layout;
  TransitionMode transition = TransitionMode::Dive;
  organizer::OrganizerOptions organizer;
  std::optional<std::filesystem::path> log_path;
  session_log::Durability durability = session_log::Durability::Fsync;
  std::string start_timestamp;
};

// One live ideation session: a single serialized event pipeline fed by client
// messages and by inference completions. Provider calls run on the executor
// (inline when none is given); their results are applied in submission order.
class Session : public std::enable_shared_from_this<Session> {
 public:
  using Clock = std::function<double()>;  // session-relative seconds, monotone
  using Executor = std::function<void(std::function<void()>)>;
  using Sink = std::function<void(const ServerMessage&)>;

  static std::shared_ptr<Session> create(SessionConfig config, std::shared_ptr<organizer::InferenceProvider> provider,
                                         Clock clock = {}, Executor executor = {}) {
    return std::shared_ptr<Session>(
        new Session(std::move(config), std::move(provider), std::move(clock), std::move(executor)));
  }

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  // Replies (Ack / Error / SceneSnapshot) go to `reply`; resulting deltas are
  // broadcast to subscribers afterwards. Both are invoked under the session
  // lock and must not block.
  void handle(const ClientMessage& message, const Sink& reply) {
    std::optional<InferenceJob> job;
    {
      std::lock_guard lock(mutex_);
      try {
        job = dispatch(message, reply);
      } catch (const Error& err) {
        reply(error_message(err.code(), err.detail(), message.ref));
      }
    }
    if (job) launch(std::move(*job));
  }

  std::vector<ServerMessage> handle(const ClientMessage& message) {
    std::vector<ServerMessage> replies;
    handle(message, [&](const ServerMessage& m) { replies.push_back(m); });
    return replies;
  }

  struct Subscription {
    std::uint64_t id = 0;
    SceneState snapshot;
  };

  // The returned snapshot and the deltas delivered afterwards join without a
  // gap or overlap.
  Subscription subscribe(Sink sink) {
    std::lock_guard lock(mutex_);
    const auto id = ++next_subscriber_;
    subscribers_.emplace_back(id, std::move(sink));
    return {id, state_};
  }

  void unsubscribe(std::uint64_t id) {
    std::lock_guard lock(mutex_);
    std::erase_if(subscribers_, [id](const auto& s) { return s.first == id; });
  }

  SceneState snapshot() const {
    std::lock_guard lock(mutex_);
    return state_;
  }

  navigation::NavState nav_state() const {
    std::lock_guard lock(mutex_);
    return nav_;
  }

  std::vector<SessionEvent> events() const {
    std::lock_guard lock(mutex_);
    return events_;
  }

  metrics::MetricsReport metrics(const metrics::OriginalityAnnotations& originality = {}) const {
    std::lock_guard lock(mutex_);
    return metrics::report_from_log(header_.initial_state(), events_, originality);
  }

  // Blocks until no inference is outstanding.
  void wait_idle() const {
    std::unique_lock lock(mutex_);
    idle_.wait(lock, [&] { return reorder_.in_flight() == 0; });
  }

  bool closed() const {
    std::lock_guard lock(mutex_);
    return end_requested_ || failed_;
  }

  const SessionConfig& config() const { return config_; }
  const session_log::SessionHeader& header() const { return header_; }

 private:
  struct InferenceJob {
    std::uint64_t ticket;
    UtteranceId utterance;
    organizer::InferenceRequest request;
  };

  struct Completion {
    UtteranceId utterance;
    organizer::Inference inference;
  };

  Session(SessionConfig config, std::shared_ptr<organizer::InferenceProvider> provider, Clock clock,
          Executor executor)
      : config_(std::move(config)), provider_(std::move(provider)), clock_(std::move(clock)),
        executor_(std::move(executor)) {
    config_.topic.validate();
    layout::validate(config_.layout);
    if (!provider_) throw Error(ErrorCode::InvalidArgument, "session needs an inference provider");
    if (!clock_) {
      const auto start = std::chrono::steady_clock::now();
      clock_ = [start] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    }
    header_ = {session_log::kFormatVersion, config_.session_id, config_.topic.id, config_.layout,
               config_.transition, config_.start_timestamp};
    state_ = header_.initial_state();
    nav_ = navigation::NavState::initial(config_.layout);
    if (config_.log_path) writer_.emplace(*config_.log_path, header_, config_.durability);
  }

  double now() {
    last_t_ = std::max(last_t_, clock_());
    return last_t_;
  }

  std::optional<InferenceJob> dispatch(const ClientMessage& message, const Sink& reply) {
    if (std::holds_alternative<msg::RequestSnapshot>(message.body)) {
      reply({msg::SceneSnapshot{state_}, message.ref});
      return std::nullopt;
    }
    if (failed_) throw Error(ErrorCode::SessionClosed, "session stopped after a storage failure");
    if (end_requested_) throw Error(ErrorCode::SessionClosed, config_.session_id + " has ended");

    std::optional<InferenceJob> job;
    std::vector<SessionEvent> produced;
    std::visit(
        [&](const auto& body) {
          using T = std::decay_t<decltype(body)>;
          const double t = now();
          if constexpr (std::is_same_v<T, msg::SubmitUtterance>) {
            if (text::trim(body.transcript).empty()) throw Error(ErrorCode::EmptyTranscript, "transcript is blank");
            const UtteranceId id{++utterance_counter_};
            auto request = organizer::make_request(config_.topic, state_, body.transcript);
            produced.push_back({0, t, event::UtteranceSubmitted{id, std::string(text::trim(body.transcript))}});
            job = InferenceJob{reorder_.reserve(), id, std::move(request)};
          } else if constexpr (std::is_same_v<T, msg::Pose>) {
            auto result = navigation::update_pose(nav_, {body.room, body.heading}, t);
            nav_ = std::move(result.state);
            if (result.event) produced.push_back(std::move(*result.event));
          } else if constexpr (std::is_same_v<T, msg::DiveIn>) {
            auto tr = navigation::dive_in(nav_, state_, body.island, t);
            nav_ = std::move(tr.state);
            produced.push_back(std::move(tr.event));
          } else if constexpr (std::is_same_v<T, msg::DiveOut>) {
            auto tr = navigation::dive_out(nav_, state_, t);
            nav_ = std::move(tr.state);
            produced.push_back(std::move(tr.event));
          } else if constexpr (std::is_same_v<T, msg::Trigger>) {
            auto tr = navigation::walk_teleport(nav_, state_, body.orb, t);
            nav_ = std::move(tr.state);
            produced.push_back(std::move(tr.event));
          } else if constexpr (std::is_same_v<T, msg::EndSession>) {
            end_requested_ = true;
          }
        },
        message.body);

    persist(produced);
    reply({msg::Ack{state_.last_seq}, message.ref});
    broadcast(produced);
    finish_if_drained();
    return job;
  }

  void launch(InferenceJob job) {
    auto run = [self = shared_from_this(), job = std::move(job)] {
      auto inference = organizer::infer(job.request, *self->provider_, self->config_.organizer);
      self->complete(job.ticket, {job.utterance, std::move(inference)});
    };
    if (executor_) executor_(std::move(run));
    else run();
  }

  void complete(std::uint64_t ticket, Completion completion) {
    std::lock_guard lock(mutex_);
    reorder_.complete(ticket, std::move(completion));
    for (auto& done : reorder_.drain()) {
      if (failed_) continue;
      auto applied = organizer::apply_inference(state_, done.utterance, done.inference, now());
      try {
        persist(applied.events);
      } catch (const Error&) {
        continue;
      }
      broadcast(applied.events);
    }
    finish_if_drained();
    idle_.notify_all();
  }

  void finish_if_drained() {
    if (!end_requested_ || failed_ || state_.ended || reorder_.in_flight() != 0) return;
    std::vector<SessionEvent> end{{0, now(), event::SessionEnded{}}};
    persist(end);
    broadcast(end);
    writer_.reset();
  }

  // Numbers, folds and logs; on a storage failure the session stops taking
  // input because the log can no longer be trusted.
  void persist(std::vector<SessionEvent>& events) {
    for (auto& ev : events) {
      ev.seq = state_.last_seq + 1;
      fold_in_place(state_, ev);
      try {
        if (writer_) writer_->append(ev);
      } catch (const Error&) {
        failed_ = true;
        throw;
      }
      events_.push_back(ev);
    }
  }

  void broadcast(const std::vector<SessionEvent>& events) {
    if (events.empty()) return;
    const ServerMessage delta{msg::SceneDelta{events}};
    for (const auto& [id, sink] : subscribers_) sink(delta);
  }

  SessionConfig config_;
  std::shared_ptr<organizer::InferenceProvider> provider_;
  Clock clock_;
  Executor executor_;
  session_log::SessionHeader header_;

  mutable std::mutex mutex_;
  mutable std::condition_variable idle_;
  SceneState state_;
  navigation::NavState nav_;
  std::vector<SessionEvent> events_;
  std::optional<session_log::LogWriter> writer_;
  organizer::ReorderBuffer<Completion> reorder_;
  std::vector<std::pair<std::uint64_t, Sink>> subscribers_;
  std::uint64_t next_subscriber_ = 0;
  std::uint64_t utterance_counter_ = 0;
  double last_t_ = 0.0;
  bool end_requested_ = false;
  bool failed_ = false;
};

}  // namespace idea_islands::service
