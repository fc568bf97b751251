#include <thread>

#include <gtest/gtest.h>

#include "idea_islands/organizer/organize.hpp"
#include "idea_islands/organizer/provider_http.hpp"

using namespace idea_islands;
using namespace idea_islands::organizer;

namespace {

// Local stand-in for a chat-completions endpoint.
class FakeModel {
 public:
  explicit FakeModel(httplib::Server::Handler handler) {
    server_.Post("/v1/chat/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeModel() {
    server_.stop();
    thread_.join();
  }
  HttpProviderConfig config() const {
    HttpProviderConfig c;
    c.base_url = "http://127.0.0.1:" + std::to_string(port_);
    c.api_key = "test-key";
    return c;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

InferenceRequest request() { return {"PROMPT TEXT", "solar roofs"}; }

}  // namespace

TEST(HttpChatProvider, SendsPromptAndReadsContent) {
  nlohmann::json seen;
  std::string auth;
  FakeModel fake([&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"Energy Saving;solar roofs"}}]})",
                    "application/json");
  });
  HttpChatProvider provider(fake.config());
  EXPECT_EQ(provider.complete(request(), std::chrono::milliseconds(2000)), "Energy Saving;solar roofs");
  EXPECT_EQ(seen["messages"][0]["content"], "PROMPT TEXT");
  EXPECT_EQ(seen["model"], "gpt-4o");
  EXPECT_EQ(auth, "Bearer test-key");
}

TEST(HttpChatProvider, NonOkStatusIsFailure) {
  FakeModel fake([](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  HttpChatProvider provider(fake.config());
  try {
    provider.complete(request(), std::chrono::milliseconds(2000));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::ProviderFailure);
  }
}

TEST(HttpChatProvider, UnexpectedBodyIsFailure) {
  FakeModel fake([](const httplib::Request&, httplib::Response& res) { res.set_content("{}", "application/json"); });
  HttpChatProvider provider(fake.config());
  try {
    provider.complete(request(), std::chrono::milliseconds(2000));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::ProviderFailure);
  }
}

TEST(HttpChatProvider, SlowReplyIsTimeout) {
  FakeModel fake([](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(600));
    res.set_content(R"({"choices":[{"message":{"content":"x;y"}}]})", "application/json");
  });
  HttpChatProvider provider(fake.config());
  try {
    provider.complete(request(), std::chrono::milliseconds(150));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::ProviderTimeout);
  }
}

TEST(HttpChatProvider, DrivesInferWithRepair) {
  int calls = 0;
  FakeModel fake([&](const httplib::Request&, httplib::Response& res) {
    const char* content = calls++ == 0 ? "no delimiter here" : "Energy Saving;solar roofs";
    res.set_content(nlohmann::json{{"choices", {{{"message", {{"content", content}}}}}}}.dump(), "application/json");
  });
  HttpChatProvider provider(fake.config());
  const auto out = infer(request(), provider);
  ASSERT_TRUE(out.parsed) << out.error_detail;
  EXPECT_EQ(out.parsed->category.display(), "Energy Saving");
  EXPECT_EQ(calls, 2);
}
