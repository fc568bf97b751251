#pragma once

// OpenAI-compatible chat-completions adapter. Pulls in cpp-httplib, so only
// binaries that talk to a live model include this header.

#include <chrono>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "idea_islands/organizer/provider.hpp"

namespace idea_islands::organizer {

struct HttpProviderConfig {
  std::string base_url = "https://api.openai.com";  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4o";
  std::string api_key;
  double temperature = 0.0;
};

class HttpChatProvider final : public InferenceProvider {
 public:
  explicit HttpChatProvider(HttpProviderConfig config) : config_(std::move(config)) {}

  std::string complete(const InferenceRequest& request, std::chrono::milliseconds deadline) override {
    httplib::Client client(config_.base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(deadline);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(deadline - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
    const nlohmann::json body = {
        {"model", config_.model},
        {"temperature", config_.temperature},
        {"messages", {{{"role", "user"}, {"content", request.prompt}}}},
    };
    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res) {
      const auto err = res.error();
      if (err == httplib::Error::Read || err == httplib::Error::Connection ||
          err == httplib::Error::ConnectionTimeout)
        throw Error(ErrorCode::ProviderTimeout, httplib::to_string(err));
      throw Error(ErrorCode::ProviderFailure, httplib::to_string(err));
    }
    if (res->status != 200)
      throw Error(ErrorCode::ProviderFailure, "HTTP " + std::to_string(res->status));
    try {
      const auto reply = nlohmann::json::parse(res->body);
      std::string content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      return content;
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::ProviderFailure, std::string("unexpected reply: ") + ex.what());
    }
  }

  std::string name() const override { return "http:" + config_.model; }

 private:
  HttpProviderConfig config_;
};

}  // namespace idea_islands::organizer
