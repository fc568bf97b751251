#include <unistd.h>

#include <atomic>
#include <mutex>
#include <thread>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace idea_islands;
using namespace idea_islands::service;

namespace {

organizer::KeywordTable table() {
  return {{"solar", {"Energy Saving", "{keyword} panels"}},
          {"bike", {"Transportation & Mobility", "{keyword} sharing"}},
          {"compost", {"Resource & Waste Management", "{keyword} bins"}},
          {"garden", {"Space Design & Greening", "rooftop {keyword}"}}};
}

SessionConfig config() {
  SessionConfig c;
  c.session_id = "test";
  c.topic = organizer::presets::study2_sustainability();
  c.transition = TransitionMode::Walk;
  return c;
}

struct Recorder {
  std::mutex mutex;
  std::vector<ServerMessage> messages;
  Session::Sink sink() {
    return [this](const ServerMessage& m) {
      std::lock_guard lock(mutex);
      messages.push_back(m);
    };
  }
};

ClientMessage submit(const std::string& text, json ref = nullptr) { return {msg::SubmitUtterance{text}, std::move(ref)}; }

// Answers after a per-transcript delay so completions arrive out of order.
class JitterProvider final : public organizer::InferenceProvider {
 public:
  std::string complete(const organizer::InferenceRequest& request, std::chrono::milliseconds) override {
    const auto delay = std::hash<std::string>{}(request.transcript) % 7;
    std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    return organizer::mock_provider(request.transcript, table());
  }
  std::string name() const override { return "jitter"; }
};

}  // namespace

TEST(Protocol, ClientFramesRoundTrip) {
  const std::vector<ClientMessage> frames{
      {msg::SubmitUtterance{"solar roofs"}, 1}, {msg::Pose{{1.5, -2}, 0.25}, "a"}, {msg::DiveIn{IslandId{3}}, nullptr},
      {msg::DiveOut{}, 2},                   {msg::Trigger{IslandId{2}}, 3},   {msg::EndSession{}, 4},
      {msg::RequestSnapshot{}, 5}};
  for (const auto& f : frames) {
    const auto back = parse_client_message(std::string_view(to_json(f).dump()));
    EXPECT_EQ(to_json(back), to_json(f));
  }
}

TEST(Protocol, MalformedFrames) {
  for (const char* bad : {"{", "[]", R"({"type":"Fly"})", R"({"type":"DiveIn"})", R"({"type":"Pose","room":[1]})"}) {
    try {
      parse_client_message(std::string_view(bad));
      ADD_FAILURE() << bad;
    } catch (const Error& err) {
      EXPECT_EQ(err.code(), ErrorCode::MalformedMessage) << bad;
    }
  }
}

TEST(Protocol, ServerFramesRoundTrip) {
  testing_support::Script script;
  script.idea(1, "Energy Saving");
  const std::vector<ServerMessage> frames{{msg::Ack{7}, 1},
                                          error_message(ErrorCode::NotInOverview, "x", "r"),
                                          {msg::SceneDelta{script.events()}, nullptr},
                                          {msg::SceneSnapshot{script.state()}, nullptr}};
  for (const auto& f : frames) {
    const auto back = parse_server_message(std::string_view(serialize(f)));
    EXPECT_EQ(serialize(back), serialize(f));
  }
  const auto delta = to_json(frames[2]);
  EXPECT_EQ(delta["from_seq"], 1);
  EXPECT_EQ(delta["to_seq"], script.events().size());
}

TEST(Session, SubmitAcksThenDelta) {
  auto provider = std::make_shared<organizer::MockProvider>(table());
  double now = 1.0;
  auto session = Session::create(config(), provider, [&] { return now; });
  Recorder all;
  std::vector<std::string> order;
  session->subscribe([&](const ServerMessage& m) { order.push_back(m.as<msg::SceneDelta>() ? "delta" : "other"); });
  session->handle(submit("solar panels on the library", 42), [&](const ServerMessage& m) {
    order.push_back(m.as<msg::Ack>() ? "ack" : "other");
    all.sink()(m);
  });
  ASSERT_EQ(all.messages.size(), 1u);
  EXPECT_EQ(all.messages[0].ref, 42);
  EXPECT_EQ(all.messages[0].as<msg::Ack>()->seq, 1u);
  // Inline executor: submission delta, then the organizer's delta.
  EXPECT_EQ(order, (std::vector<std::string>{"ack", "delta", "delta"}));

  const auto events = session->events();
  std::vector<EventKind> kinds;
  for (const auto& ev : events) kinds.push_back(ev.kind());
  EXPECT_EQ(kinds, (std::vector<EventKind>{EventKind::UtteranceSubmitted, EventKind::Categorized,
                                           EventKind::IslandCreated, EventKind::TreeAdded}));
  EXPECT_EQ(session->snapshot().islands.at(0).category.display(), "Energy Saving");
}

TEST(Session, GuardErrorsSurfaceAsFrames) {
  auto session = Session::create(config(), std::make_shared<organizer::MockProvider>(table()));
  session->handle(submit("solar"));
  auto replies = session->handle({msg::DiveIn{IslandId{1}}, 1});
  ASSERT_TRUE(replies.at(0).as<msg::Ack>());
  replies = session->handle({msg::DiveIn{IslandId{1}}, 2});
  const auto* err = replies.at(0).as<msg::ErrorFrame>();
  ASSERT_TRUE(err);
  EXPECT_EQ(err->code, "NotInOverview");
  EXPECT_EQ(replies[0].ref, 2);
  EXPECT_EQ(session->handle(submit("   ")).at(0).as<msg::ErrorFrame>()->code, "EmptyTranscript");
  EXPECT_EQ(session->handle({msg::DiveIn{IslandId{9}}}).at(0).as<msg::ErrorFrame>()->code, "NotInOverview");
}

TEST(Session, RequestSnapshot) {
  auto session = Session::create(config(), std::make_shared<organizer::MockProvider>(table()));
  session->handle(submit("bike lanes"));
  const auto replies = session->handle({msg::RequestSnapshot{}, "s"});
  ASSERT_EQ(replies.size(), 1u);
  EXPECT_EQ(replies[0].as<msg::SceneSnapshot>()->state, session->snapshot());
}

TEST(Session, EndSessionWaitsForInFlightInference) {
  std::vector<std::function<void()>> parked;
  auto session = Session::create(config(), std::make_shared<organizer::MockProvider>(table()), {},
                                 [&](std::function<void()> job) { parked.push_back(std::move(job)); });
  session->handle(submit("solar"));
  session->handle({msg::EndSession{}});
  EXPECT_FALSE(session->snapshot().ended);
  EXPECT_EQ(session->handle(submit("bike")).at(0).as<msg::ErrorFrame>()->code, "SessionClosed");
  for (auto& job : parked) job();
  const auto events = session->events();
  EXPECT_EQ(events.back().kind(), EventKind::SessionEnded);
  EXPECT_EQ(events[events.size() - 2].kind(), EventKind::TreeAdded);
  EXPECT_TRUE(session->snapshot().ended);
}

TEST(Session, OrderPreservedWithConcurrentProvider) {
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::thread> threads;
    std::mutex threads_mutex;
    auto session = Session::create(config(), std::make_shared<JitterProvider>(), {},
                                   [&](std::function<void()> job) {
                                     std::lock_guard lock(threads_mutex);
                                     threads.emplace_back(std::move(job));
                                   });
    const std::vector<std::string> words{"solar", "bike", "compost", "garden"};
    for (int i = 0; i < 40; ++i) session->handle(submit(words[(i * 7 + trial) % 4] + " idea " + std::to_string(i)));
    session->wait_idle();
    {
      std::lock_guard lock(threads_mutex);
      for (auto& t : threads) t.join();
    }
    std::vector<std::uint64_t> submitted, categorized;
    for (const auto& ev : session->events()) {
      if (const auto* e = ev.as<event::UtteranceSubmitted>()) submitted.push_back(e->utterance.value);
      if (const auto* e = ev.as<event::Categorized>()) categorized.push_back(e->utterance.value);
    }
    ASSERT_EQ(categorized, submitted);
  }
}

TEST(Session, SnapshotDeltaCoherence) {
  auto session = Session::create(config(), std::make_shared<organizer::MockProvider>(table()));
  std::mt19937_64 rng(53);
  const std::vector<std::string> words{"solar", "bike", "compost", "garden"};

  SceneState mirror;
  bool have_mirror = false;
  std::uint64_t sub = 0;
  for (int step = 0; step < 300; ++step) {
    if (step == 50) {
      auto s = session->subscribe([&](const ServerMessage& m) {
        if (const auto* d = m.as<msg::SceneDelta>()) mirror = fold_all(mirror, d->events);
      });
      mirror = s.snapshot;
      have_mirror = true;
      sub = s.id;
    }
    const int pick = static_cast<int>(rng() % 6);
    if (pick < 3) session->handle(submit(words[rng() % 4] + " " + std::to_string(step)));
    else if (pick == 3) session->handle({msg::DiveIn{IslandId{1 + rng() % 4}}});
    else if (pick == 4) session->handle({msg::DiveOut{}});
    else session->handle({msg::Pose{{double(rng() % 100) / 50.0, 0.3}, 0.1}});
    if (have_mirror) {
      ASSERT_EQ(mirror, session->snapshot());
    }
  }
  session->unsubscribe(sub);
}

TEST(Session, LiveLogReplaysToLiveState) {
  const auto dir = std::filesystem::temp_directory_path() / ("idea-islands-svc-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  auto c = config();
  c.log_path = dir / "live.jsonl";
  c.durability = session_log::Durability::Flush;
  double now = 0;
  auto session = Session::create(c, std::make_shared<organizer::MockProvider>(table()), [&] { return now; });
  for (const char* text : {"solar", "bike", "compost", "solar roofs"}) {
    now += 3;
    session->handle(submit(text));
  }
  now += 1;
  session->handle({msg::DiveIn{IslandId{1}}});
  now += 0.05;
  session->handle({msg::Pose{{0.2, 0.1}, 0.5}});
  now += 10;
  session->handle(submit("garden beds"));
  session->handle({msg::EndSession{}});

  const auto replayed = session_log::replay(*c.log_path);
  EXPECT_EQ(replayed.final_state, session->snapshot());
  EXPECT_EQ(replayed.events, session->events());
  EXPECT_EQ(metrics::format_text(metrics::report_from_log(replayed.header.initial_state(), replayed.events)),
            metrics::format_text(session->metrics()));
  std::filesystem::remove_all(dir);
}

TEST(Session, PoseThrottleKeepsLiveUser) {
  double now = 0;
  auto session = Session::create(config(), std::make_shared<organizer::MockProvider>(table()), [&] { return now; });
  now = 1.0;
  session->handle({msg::Pose{{1, 1}, 0}});
  now = 1.05;
  session->handle({msg::Pose{{2, 2}, 0}});
  EXPECT_EQ(session->events().size(), 1u);
  EXPECT_EQ(session->nav_state().user.room_position, (Vec2{2, 2}));
}

TEST(Manager, CreateFindHandle) {
  auto cfg = ServiceConfig::with_presets();
  cfg.inference_threads = 2;
  SessionManager manager(cfg, std::make_shared<organizer::MockProvider>(table()));
  auto a = manager.create();
  auto b = manager.create("study1-health", TransitionMode::Walk);
  EXPECT_EQ(a->config().session_id, "s1");
  EXPECT_EQ(b->config().session_id, "s2");
  EXPECT_EQ(b->config().topic.id, "study1-health");
  EXPECT_EQ(manager.ids(), (std::vector<std::string>{"s1", "s2"}));
  EXPECT_THROW(manager.create("nope"), Error);

  Recorder rec;
  manager.handle("s9", submit("x", 5), rec.sink());
  ASSERT_EQ(rec.messages.size(), 1u);
  EXPECT_EQ(rec.messages[0].as<msg::ErrorFrame>()->code, "UnknownSession");
  EXPECT_EQ(rec.messages[0].ref, 5);

  manager.handle("s1", submit("solar"), rec.sink());
  a->wait_idle();
  EXPECT_EQ(a->snapshot().islands.size(), 1u);
  EXPECT_TRUE(b->snapshot().islands.empty());
}

TEST(Manager, WritesLogsPerSession) {
  const auto dir = std::filesystem::temp_directory_path() / ("idea-islands-mgr-" + std::to_string(::getpid()));
  auto cfg = ServiceConfig::with_presets();
  cfg.log_dir = dir;
  cfg.durability = session_log::Durability::Flush;
  {
    SessionManager manager(cfg, std::make_shared<organizer::MockProvider>(table()));
    auto s = manager.create();
    s->handle(submit("bike"));
    s->wait_idle();
    s->handle({msg::EndSession{}});
    EXPECT_TRUE(std::filesystem::exists(dir / "s1.jsonl"));
    EXPECT_EQ(session_log::replay(dir / "s1.jsonl").final_state, s->snapshot());
  }
  std::filesystem::remove_all(dir);
}
