#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "idea_islands/core/fold.hpp"
#include "idea_islands/layout.hpp"

// Session files are UTF-8 text. The first line is the header:
//
//   #idea-islands-log {"format_version":1, "session_id":..., ...}
//
// and every following line is one event object:
//
//   {"seq":N, "t":seconds, "kind":"<EventKind>", "payload":{...}}
//
// Field names per kind are listed in docs/session-log.md.
namespace idea_islands::session_log {

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kHeaderPrefix = "#idea-islands-log ";

using nlohmann::json;

struct SessionHeader {
  int format_version = kFormatVersion;
  std::string session_id;
  std::string topic_config_id;
  LayoutParams layout;
  TransitionMode transition = TransitionMode::Dive;
  std::string start_timestamp;  // ISO-8601 UTC, informational

  SceneState initial_state() const { return SceneState::initial(topic_config_id, layout, transition); }

  friend bool operator==(const SessionHeader&, const SessionHeader&) = default;
};

// ---- value codecs -----------------------------------------------------------

namespace codec {

inline json vec(Vec2 v) { return json::array({v.x, v.y}); }
inline Vec2 vec(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

inline json pose(const Pose2& p) { return {{"position", vec(p.position)}, {"rotation", p.rotation}}; }
inline Pose2 pose(const json& j) { return {vec(j.at("position")), j.at("rotation").get<double>()}; }

inline json rigid(const Rigid2& r) { return {{"rotation", r.rotation}, {"translation", vec(r.translation)}}; }
inline Rigid2 rigid(const json& j) { return {j.at("rotation").get<double>(), vec(j.at("translation"))}; }

inline json mapping(const RoomMapping& m) {
  return {{"origin_offset", vec(m.origin_offset)}, {"scale_factor", m.scale_factor}, {"rotation", m.rotation}};
}
inline RoomMapping mapping(const json& j) {
  return {vec(j.at("origin_offset")), j.at("scale_factor").get<double>(), j.at("rotation").get<double>()};
}

inline json room_pose(const event::RoomPose& p) { return {{"position", vec(p.position)}, {"heading", p.heading}}; }
inline event::RoomPose room_pose(const json& j) { return {vec(j.at("position")), j.at("heading").get<double>()}; }

inline json slot(TreeSlot s) { return s.is_overflow() ? json("overflow") : json(s.index()); }
inline TreeSlot slot(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "overflow") throw Error(ErrorCode::CorruptLine, "bad slot");
    return TreeSlot::overflow();
  }
  return TreeSlot::at(j.get<int>());
}

inline json layout_params(const LayoutParams& p) {
  return {{"island_radius_body", p.island_radius_body},
          {"island_radius_mini", p.island_radius_mini},
          {"pathway_radius_ratio", p.pathway_radius_ratio},
          {"slots_per_island", p.slots_per_island},
          {"overview_ring_radius", p.overview_ring_radius},
          {"orb_activation_radius", p.orb_activation_radius},
          {"overview_scale", p.overview_scale}};
}
inline LayoutParams layout_params(const json& j) {
  LayoutParams p;
  p.island_radius_body = j.at("island_radius_body").get<double>();
  p.island_radius_mini = j.at("island_radius_mini").get<double>();
  p.pathway_radius_ratio = j.at("pathway_radius_ratio").get<double>();
  p.slots_per_island = j.at("slots_per_island").get<int>();
  p.overview_ring_radius = j.at("overview_ring_radius").get<double>();
  p.orb_activation_radius = j.at("orb_activation_radius").get<double>();
  p.overview_scale = j.at("overview_scale").get<double>();
  return p;
}

inline TransitionMode transition(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "walk") return TransitionMode::Walk;
  if (s == "dive") return TransitionMode::Dive;
  throw Error(ErrorCode::InvalidArgument, "transition must be walk or dive, got " + s);
}

template <typename IdT>
IdT id(const json& j) { return IdT{j.get<std::uint64_t>()}; }

inline json payload(const event::UtteranceSubmitted& e) {
  return {{"utterance", e.utterance.value}, {"transcript", e.transcript}};
}
inline json payload(const event::Categorized& e) {
  return {{"utterance", e.utterance.value}, {"category", e.category}, {"summary", e.summary}, {"raw", e.raw},
          {"category_words_flagged", e.flags.category_out_of_range},
          {"summary_words_flagged", e.flags.summary_out_of_range}};
}
inline json payload(const event::IslandCreated& e) {
  return {{"island", e.island.value}, {"category", e.category}, {"overview_pose", pose(e.overview_pose)}};
}
inline json payload(const event::TreeAdded& e) {
  return {{"tree", e.tree.value}, {"island", e.island.value}, {"utterance", e.utterance.value},
          {"summary", e.summary}, {"slot", slot(e.slot)}};
}
inline json payload(const event::DiveIn& e) {
  return {{"island", e.island.value}, {"mapping", mapping(e.mapping)}, {"pose", room_pose(e.pose)}};
}
inline json payload(const event::DiveOut& e) {
  return {{"from", e.from.value}, {"mapping", mapping(e.mapping)}, {"pose", room_pose(e.pose)}};
}
inline json payload(const event::WalkTeleport& e) {
  return {{"from", e.from.value}, {"to", e.to.value}, {"placement", rigid(e.placement)},
          {"pose", room_pose(e.pose)}, {"fade_seconds", e.fade_seconds}};
}
inline json payload(const event::PoseUpdate& e) { return {{"pose", room_pose(e.pose)}}; }
inline json payload(const event::InferenceError& e) {
  return {{"utterance", e.utterance.value}, {"reason", e.reason}, {"detail", e.detail}};
}
inline json payload(const event::SessionEnded&) { return json::object(); }

inline EventPayload payload(EventKind kind, const json& j) {
  switch (kind) {
    case EventKind::UtteranceSubmitted:
      return event::UtteranceSubmitted{id<UtteranceId>(j.at("utterance")), j.at("transcript").get<std::string>()};
    case EventKind::Categorized:
      return event::Categorized{id<UtteranceId>(j.at("utterance")), j.at("category").get<std::string>(),
                                j.at("summary").get<std::string>(), j.at("raw").get<std::string>(),
                                {j.at("category_words_flagged").get<bool>(), j.at("summary_words_flagged").get<bool>()}};
    case EventKind::IslandCreated:
      return event::IslandCreated{id<IslandId>(j.at("island")), j.at("category").get<std::string>(),
                                  pose(j.at("overview_pose"))};
    case EventKind::TreeAdded:
      return event::TreeAdded{id<TreeId>(j.at("tree")), id<IslandId>(j.at("island")),
                              id<UtteranceId>(j.at("utterance")), j.at("summary").get<std::string>(),
                              slot(j.at("slot"))};
    case EventKind::DiveIn:
      return event::DiveIn{id<IslandId>(j.at("island")), mapping(j.at("mapping")), room_pose(j.at("pose"))};
    case EventKind::DiveOut:
      return event::DiveOut{id<IslandId>(j.at("from")), mapping(j.at("mapping")), room_pose(j.at("pose"))};
    case EventKind::WalkTeleport:
      return event::WalkTeleport{id<IslandId>(j.at("from")), id<IslandId>(j.at("to")), rigid(j.at("placement")),
                                 room_pose(j.at("pose")), j.at("fade_seconds").get<double>()};
    case EventKind::PoseUpdate:
      return event::PoseUpdate{room_pose(j.at("pose"))};
    case EventKind::InferenceError:
      return event::InferenceError{id<UtteranceId>(j.at("utterance")), j.at("reason").get<std::string>(),
                                   j.at("detail").get<std::string>()};
    case EventKind::SessionEnded:
      return event::SessionEnded{};
  }
  throw Error(ErrorCode::UnknownEventKind, "unhandled kind");
}

}  // namespace codec

inline EventKind parse_kind(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kEventKindNames); ++i)
    if (kEventKindNames[i] == name) return static_cast<EventKind>(i);
  throw Error(ErrorCode::UnknownEventKind, std::string(name));
}

inline json to_json(const SessionEvent& ev) {
  return {{"seq", ev.seq},
          {"t", ev.t},
          {"kind", std::string(to_string(ev.kind()))},
          {"payload", std::visit([](const auto& e) { return codec::payload(e); }, ev.payload)}};
}

inline SessionEvent event_from_json(const json& j) {
  try {
    const auto kind = parse_kind(j.at("kind").get<std::string>());
    return {j.at("seq").get<std::uint64_t>(), j.at("t").get<double>(), codec::payload(kind, j.at("payload"))};
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::MalformedMessage, ex.what());
  }
}

inline std::string serialize(const SessionEvent& ev) { return to_json(ev).dump(); }

inline SessionEvent parse_event_line(std::string_view line) {
  try {
    return event_from_json(json::parse(line));
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::MalformedMessage, ex.what());
  }
}

inline json to_json(const SessionHeader& h) {
  return {{"format_version", h.format_version},
          {"session_id", h.session_id},
          {"topic_config_id", h.topic_config_id},
          {"layout_params", codec::layout_params(h.layout)},
          {"layout_params_hash", layout::params_hash(h.layout)},
          {"transition", to_string(h.transition)},
          {"start_timestamp", h.start_timestamp}};
}

inline SessionHeader header_from_json(const json& j) {
  SessionHeader h;
  h.format_version = j.at("format_version").get<int>();
  if (h.format_version != kFormatVersion)
    throw Error(ErrorCode::CorruptLine, "line 1: unsupported format_version " + std::to_string(h.format_version));
  h.session_id = j.at("session_id").get<std::string>();
  h.topic_config_id = j.at("topic_config_id").get<std::string>();
  h.layout = codec::layout_params(j.at("layout_params"));
  if (j.at("layout_params_hash").get<std::string>() != layout::params_hash(h.layout))
    throw Error(ErrorCode::CorruptLine, "line 1: layout_params_hash mismatch");
  h.transition = codec::transition(j.at("transition"));
  h.start_timestamp = j.at("start_timestamp").get<std::string>();
  return h;
}

inline std::string serialize(const SessionHeader& h) { return std::string(kHeaderPrefix) + to_json(h).dump(); }

// ---- scene snapshots -----------------------------------------------------------

namespace codec {

inline json mode(const Mode& m) { return m.is_overview() ? json(nullptr) : json(m.island().value); }
inline Mode mode(const json& j) { return j.is_null() ? Mode::overview() : Mode::immersed(id<IslandId>(j)); }

inline const char* status(IdeaStatus s) {
  switch (s) {
    case IdeaStatus::Pending: return "pending";
    case IdeaStatus::Categorized: return "categorized";
    case IdeaStatus::Failed: return "failed";
  }
  return "pending";
}
inline IdeaStatus status(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "categorized") return IdeaStatus::Categorized;
  if (s == "failed") return IdeaStatus::Failed;
  if (s == "pending") return IdeaStatus::Pending;
  throw Error(ErrorCode::MalformedMessage, "bad idea status " + s);
}

}  // namespace codec

// Full SceneState; `mode` is null for OVERVIEW or the immersed island id.
inline json to_json(const SceneState& s) {
  json islands = json::array();
  for (const auto& island : s.islands) {
    json trees = json::array();
    for (const auto& t : island.trees)
      trees.push_back({{"id", t.id.value}, {"utterance", t.utterance.value}, {"summary", t.summary},
                       {"slot", codec::slot(t.slot)}, {"created_at", t.created_at}});
    islands.push_back({{"id", island.id.value},
                       {"category", island.category.display()},
                       {"trees", trees},
                       {"overview_pose", codec::pose(island.overview_pose)},
                       {"pathway", {{"radius", island.pathway.radius}, {"entry_angle", island.pathway.entry_angle}}},
                       {"cloud_label", island.cloud_label},
                       {"created_at", island.created_at},
                       {"unseen_ideas", island.unseen_ideas}});
  }
  json orbs = json::array();
  for (const auto& o : s.orbs)
    orbs.push_back({{"target", o.target.value}, {"position", codec::vec(o.position)}, {"pulse_count", o.pulse_count}});
  json utterances = json::array();
  for (const auto& u : s.utterances)
    utterances.push_back({{"id", u.id.value},
                          {"t", u.t},
                          {"transcript", u.transcript},
                          {"location", codec::mode(u.location)},
                          {"status", codec::status(u.status)},
                          {"category", u.category ? json(u.category->display()) : json(nullptr)},
                          {"summary", u.summary},
                          {"tree", u.tree ? json(u.tree->value) : json(nullptr)}});
  return {{"topic_config_id", s.topic_config_id},
          {"layout_params", codec::layout_params(s.layout)},
          {"transition", to_string(s.transition)},
          {"islands", islands},
          {"orbs", orbs},
          {"user", {{"room_position", codec::vec(s.user.room_position)},
                    {"world_position", codec::vec(s.user.world_position)},
                    {"heading", s.user.heading},
                    {"mode", codec::mode(s.user.mode)}}},
          {"mapping", codec::mapping(s.mapping)},
          {"island_placement", codec::rigid(s.island_placement)},
          {"utterances", utterances},
          {"last_seq", s.last_seq},
          {"last_t", s.last_t},
          {"ended", s.ended}};
}

inline SceneState scene_from_json(const json& j) {
  try {
    SceneState s;
    s.topic_config_id = j.at("topic_config_id").get<std::string>();
    s.layout = codec::layout_params(j.at("layout_params"));
    s.transition = codec::transition(j.at("transition"));
    for (const auto& ij : j.at("islands")) {
      Island island{codec::id<IslandId>(ij.at("id")), CategoryLabel(ij.at("category").get<std::string>()), {},
                    codec::pose(ij.at("overview_pose")),
                    Pathway{ij.at("pathway").at("radius").get<double>(), ij.at("pathway").at("entry_angle").get<double>()},
                    ij.at("cloud_label").get<std::string>(), ij.at("created_at").get<double>(),
                    ij.at("unseen_ideas").get<int>()};
      for (const auto& tj : ij.at("trees"))
        island.trees.push_back({codec::id<TreeId>(tj.at("id")), codec::id<UtteranceId>(tj.at("utterance")),
                                tj.at("summary").get<std::string>(), codec::slot(tj.at("slot")),
                                tj.at("created_at").get<double>()});
      s.islands.push_back(std::move(island));
    }
    for (const auto& oj : j.at("orbs"))
      s.orbs.push_back({codec::id<IslandId>(oj.at("target")), codec::vec(oj.at("position")), oj.at("pulse_count").get<int>()});
    const auto& uj = j.at("user");
    s.user = {codec::vec(uj.at("room_position")), codec::vec(uj.at("world_position")), uj.at("heading").get<double>(),
              codec::mode(uj.at("mode"))};
    s.mapping = codec::mapping(j.at("mapping"));
    s.island_placement = codec::rigid(j.at("island_placement"));
    for (const auto& rj : j.at("utterances")) {
      UtteranceRecord r;
      r.id = codec::id<UtteranceId>(rj.at("id"));
      r.t = rj.at("t").get<double>();
      r.transcript = rj.at("transcript").get<std::string>();
      r.location = codec::mode(rj.at("location"));
      r.status = codec::status(rj.at("status"));
      if (!rj.at("category").is_null()) r.category = CategoryLabel(rj.at("category").get<std::string>());
      r.summary = rj.at("summary").get<std::string>();
      if (!rj.at("tree").is_null()) r.tree = codec::id<TreeId>(rj.at("tree"));
      s.utterances.push_back(std::move(r));
    }
    s.last_seq = j.at("last_seq").get<std::uint64_t>();
    s.last_t = j.at("last_t").get<double>();
    s.ended = j.at("ended").get<bool>();
    return s;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::MalformedMessage, std::string("scene snapshot: ") + ex.what());
  }
}

// ---- writer -----------------------------------------------------------------

enum class Durability {
  Flush,  // write(2) per event; survives process crashes
  Fsync,  // plus fsync(2) per event; survives power loss
};

// Single appender for one session file. Each append reaches the kernel (and
// with Fsync, the disk) before returning.
class LogWriter {
 public:
  LogWriter(const std::filesystem::path& path, const SessionHeader& header, Durability durability = Durability::Fsync)
      : path_(path), durability_(durability) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd_ < 0) fail("open");
    write_line(serialize(header));
  }

  LogWriter(const LogWriter&) = delete;
  LogWriter& operator=(const LogWriter&) = delete;
  LogWriter(LogWriter&& other) noexcept
      : path_(std::move(other.path_)), durability_(other.durability_), fd_(other.fd_), last_seq_(other.last_seq_) {
    other.fd_ = -1;
  }

  ~LogWriter() {
    if (fd_ >= 0) ::close(fd_);
  }

  void append(const SessionEvent& ev) {
    if (ev.seq != last_seq_ + 1)
      throw Error(ErrorCode::SequenceGap,
                  "log expects seq " + std::to_string(last_seq_ + 1) + ", got " + std::to_string(ev.seq));
    write_line(serialize(ev));
    last_seq_ = ev.seq;
  }

  std::uint64_t last_seq() const { return last_seq_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  [[noreturn]] void fail(const char* what) const {
    throw Error(ErrorCode::StorageFailure, std::string(what) + " " + path_.string() + ": " + std::strerror(errno));
  }

  void write_line(std::string line) {
    line.push_back('\n');
    std::string_view rest = line;
    while (!rest.empty()) {
      const auto n = ::write(fd_, rest.data(), rest.size());
      if (n < 0) {
        if (errno == EINTR) continue;
        fail("write");
      }
      rest.remove_prefix(static_cast<std::size_t>(n));
    }
    if (durability_ == Durability::Fsync && ::fsync(fd_) != 0) fail("fsync");
  }

  std::filesystem::path path_;
  Durability durability_;
  int fd_ = -1;
  std::uint64_t last_seq_ = 0;
};

// ---- loading and replay -----------------------------------------------------

struct LoadedLog {
  SessionHeader header;
  std::vector<SessionEvent> events;
  SceneState final_state;
  std::optional<std::size_t> corrupt_line;  // set only by tolerant loads
  std::string corrupt_detail;
};

struct LoadOptions {
  bool stop_at_corruption = false;  // keep the valid prefix instead of throwing
};

namespace detail {

// Parses and folds line by line so semantic breaks (gaps, dangling
// references) are caught at the same line as syntax errors.
inline LoadedLog load_stream(std::istream& in, const LoadOptions& options,
                             const std::function<void(const SessionEvent&, const SceneState&)>& visit) {
  LoadedLog out;
  std::string line;
  if (!std::getline(in, line) || !line.starts_with(kHeaderPrefix))
    throw Error(ErrorCode::CorruptLine, "line 1: missing session header");
  try {
    out.header = header_from_json(json::parse(line.substr(kHeaderPrefix.size())));
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::CorruptLine, std::string("line 1: ") + ex.what());
  } catch (const Error& err) {
    if (err.code() == ErrorCode::CorruptLine) throw;
    throw Error(ErrorCode::CorruptLine, "line 1: " + err.detail());
  }

  SceneState state = out.header.initial_state();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      SessionEvent ev = parse_event_line(line);
      fold_in_place(state, ev);
      if (visit) visit(ev, state);
      out.events.push_back(std::move(ev));
    } catch (const Error& err) {
      const std::string detail = "line " + std::to_string(line_no) + ": " + err.what();
      if (!options.stop_at_corruption) throw Error(ErrorCode::CorruptLine, detail);
      out.corrupt_line = line_no;
      out.corrupt_detail = detail;
      break;
    }
  }
  out.final_state = std::move(state);
  return out;
}

inline std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::StorageFailure, "cannot open " + path.string());
  return in;
}

}  // namespace detail

inline LoadedLog load(const std::filesystem::path& path, const LoadOptions& options = {}) {
  auto in = detail::open_for_read(path);
  return detail::load_stream(in, options, {});
}

inline LoadedLog load_text(const std::string& text, const LoadOptions& options = {}) {
  std::istringstream in(text);
  return detail::load_stream(in, options, {});
}

struct ReplayResult {
  SessionHeader header;
  SceneState final_state;
  std::vector<SessionEvent> events;
  std::optional<std::size_t> corrupt_line;
};

// Folds the file from its header's initial state. `on_state` sees the state
// after every event. Replay never consults an inference provider: categories
// come from the logged Categorized events.
inline ReplayResult replay(const std::filesystem::path& path,
                           const std::function<void(const SessionEvent&, const SceneState&)>& on_state = {},
                           const LoadOptions& options = {}) {
  auto in = detail::open_for_read(path);
  auto loaded = detail::load_stream(in, options, on_state);
  return {std::move(loaded.header), std::move(loaded.final_state), std::move(loaded.events), loaded.corrupt_line};
}

}  // namespace idea_islands::session_log
