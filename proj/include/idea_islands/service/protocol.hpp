#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "idea_islands/session_log.hpp"

// Wire protocol: one JSON object per frame, discriminated by "type". Any
// client frame may carry "id"; the server echoes it as "ref" on the Ack or
// Error answering that frame. The message catalog is in docs/protocol.md.
namespace idea_islands::service {

using nlohmann::json;

namespace msg {

struct SubmitUtterance { std::string transcript; };
struct Pose { Vec2 room; double heading = 0.0; };
struct DiveIn { IslandId island; };
struct DiveOut {};
struct Trigger { IslandId orb; };
struct EndSession {};
struct RequestSnapshot {};

struct Ack { std::uint64_t seq = 0; };
struct ErrorFrame { std::string code; std::string detail; };
struct SceneDelta { std::vector<SessionEvent> events; };
struct SceneSnapshot { SceneState state; };

}  // namespace msg

using ClientBody = std::variant<msg::SubmitUtterance, msg::Pose, msg::DiveIn, msg::DiveOut, msg::Trigger,
                                msg::EndSession, msg::RequestSnapshot>;
using ServerBody = std::variant<msg::Ack, msg::ErrorFrame, msg::SceneDelta, msg::SceneSnapshot>;

struct ClientMessage {
  ClientBody body;
  json ref = nullptr;  // client-chosen correlation id, echoed back
};

struct ServerMessage {
  ServerBody body;
  json ref = nullptr;

  template <typename T>
  const T* as() const { return std::get_if<T>(&body); }
};

inline ServerMessage error_message(ErrorCode code, std::string detail, json ref = nullptr) {
  return {msg::ErrorFrame{std::string(to_string(code)), std::move(detail)}, std::move(ref)};
}

// ---- client frames ----------------------------------------------------------

inline ClientMessage parse_client_message(const json& j) {
  try {
    ClientMessage m;
    if (j.contains("id")) m.ref = j.at("id");
    const auto type = j.at("type").get<std::string>();
    if (type == "SubmitUtterance") m.body = msg::SubmitUtterance{j.at("transcript").get<std::string>()};
    else if (type == "Pose") m.body = msg::Pose{session_log::codec::vec(j.at("room")), j.at("heading").get<double>()};
    else if (type == "DiveIn") m.body = msg::DiveIn{IslandId{j.at("island_id").get<std::uint64_t>()}};
    else if (type == "DiveOut") m.body = msg::DiveOut{};
    else if (type == "Trigger") m.body = msg::Trigger{IslandId{j.at("orb_id").get<std::uint64_t>()}};
    else if (type == "EndSession") m.body = msg::EndSession{};
    else if (type == "RequestSnapshot") m.body = msg::RequestSnapshot{};
    else throw Error(ErrorCode::MalformedMessage, "unknown message type " + type);
    return m;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::MalformedMessage, ex.what());
  }
}

inline ClientMessage parse_client_message(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::MalformedMessage, ex.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::MalformedMessage, "frame is not a JSON object");
  return parse_client_message(j);
}

inline json to_json(const ClientMessage& m) {
  json j = std::visit(
      [](const auto& b) -> json {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, msg::SubmitUtterance>) return {{"type", "SubmitUtterance"}, {"transcript", b.transcript}};
        else if constexpr (std::is_same_v<T, msg::Pose>)
          return {{"type", "Pose"}, {"room", session_log::codec::vec(b.room)}, {"heading", b.heading}};
        else if constexpr (std::is_same_v<T, msg::DiveIn>) return {{"type", "DiveIn"}, {"island_id", b.island.value}};
        else if constexpr (std::is_same_v<T, msg::DiveOut>) return {{"type", "DiveOut"}};
        else if constexpr (std::is_same_v<T, msg::Trigger>) return {{"type", "Trigger"}, {"orb_id", b.orb.value}};
        else if constexpr (std::is_same_v<T, msg::EndSession>) return {{"type", "EndSession"}};
        else return {{"type", "RequestSnapshot"}};
      },
      m.body);
  if (!m.ref.is_null()) j["id"] = m.ref;
  return j;
}

// ---- server frames ----------------------------------------------------------

inline json to_json(const ServerMessage& m) {
  json j = std::visit(
      [](const auto& b) -> json {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, msg::Ack>) {
          return {{"type", "Ack"}, {"seq", b.seq}};
        } else if constexpr (std::is_same_v<T, msg::ErrorFrame>) {
          return {{"type", "Error"}, {"code", b.code}, {"detail", b.detail}};
        } else if constexpr (std::is_same_v<T, msg::SceneDelta>) {
          json events = json::array();
          for (const auto& ev : b.events) events.push_back(session_log::to_json(ev));
          const std::uint64_t from = b.events.empty() ? 0 : b.events.front().seq;
          const std::uint64_t to = b.events.empty() ? 0 : b.events.back().seq;
          return {{"type", "SceneDelta"}, {"from_seq", from}, {"to_seq", to}, {"events", events}};
        } else {
          return {{"type", "SceneSnapshot"}, {"seq", b.state.last_seq}, {"state", session_log::to_json(b.state)}};
        }
      },
      m.body);
  if (!m.ref.is_null()) j["ref"] = m.ref;
  return j;
}

inline ServerMessage parse_server_message(const json& j) {
  try {
    ServerMessage m;
    if (j.contains("ref")) m.ref = j.at("ref");
    const auto type = j.at("type").get<std::string>();
    if (type == "Ack") {
      m.body = msg::Ack{j.at("seq").get<std::uint64_t>()};
    } else if (type == "Error") {
      m.body = msg::ErrorFrame{j.at("code").get<std::string>(), j.at("detail").get<std::string>()};
    } else if (type == "SceneDelta") {
      msg::SceneDelta d;
      for (const auto& e : j.at("events")) d.events.push_back(session_log::event_from_json(e));
      m.body = std::move(d);
    } else if (type == "SceneSnapshot") {
      m.body = msg::SceneSnapshot{session_log::scene_from_json(j.at("state"))};
    } else {
      throw Error(ErrorCode::MalformedMessage, "unknown server message type " + type);
    }
    return m;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::MalformedMessage, ex.what());
  }
}

inline ServerMessage parse_server_message(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::MalformedMessage, ex.what());
  }
  return parse_server_message(j);
}

inline std::string serialize(const ServerMessage& m) { return to_json(m).dump(); }
inline std::string serialize(const ClientMessage& m) { return to_json(m).dump(); }

}  // namespace idea_islands::service
