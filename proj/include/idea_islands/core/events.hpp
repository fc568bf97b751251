#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "idea_islands/core/model.hpp"

namespace idea_islands {

// Word-count rule violations on a provider answer (categories 1-3 words,
// summaries 1-5 words). Flagged, never fatal.
struct WordCountFlags {
  bool category_out_of_range = false;
  bool summary_out_of_range = false;

  bool any() const { return category_out_of_range || summary_out_of_range; }
  friend bool operator==(const WordCountFlags&, const WordCountFlags&) = default;
};

namespace event {

struct UtteranceSubmitted {
  UtteranceId utterance;
  std::string transcript;
  friend bool operator==(const UtteranceSubmitted&, const UtteranceSubmitted&) = default;
};

struct Categorized {
  UtteranceId utterance;
  std::string category;
  std::string summary;
  std::string raw;  // provider line as received
  WordCountFlags flags;
  friend bool operator==(const Categorized&, const Categorized&) = default;
};

struct IslandCreated {
  IslandId island;
  std::string category;
  Pose2 overview_pose;
  friend bool operator==(const IslandCreated&, const IslandCreated&) = default;
};

struct TreeAdded {
  TreeId tree;
  IslandId island;
  UtteranceId utterance;
  std::string summary;
  TreeSlot slot = TreeSlot::overflow();
  friend bool operator==(const TreeAdded&, const TreeAdded&) = default;
};

// Room pose the transition was computed from. World pose follows from the
// mapping carried in (or already held by) the state.
struct RoomPose {
  Vec2 position;
  double heading = 0.0;
  friend bool operator==(const RoomPose&, const RoomPose&) = default;
};

struct DiveIn {
  IslandId island;
  RoomMapping mapping;
  RoomPose pose;
  friend bool operator==(const DiveIn&, const DiveIn&) = default;
};

struct DiveOut {
  IslandId from;
  RoomMapping mapping;
  RoomPose pose;
  friend bool operator==(const DiveOut&, const DiveOut&) = default;
};

struct WalkTeleport {
  IslandId from;
  IslandId to;
  Rigid2 placement;
  RoomPose pose;
  double fade_seconds = 0.8;  // renderer hint for fading out `from`
  friend bool operator==(const WalkTeleport&, const WalkTeleport&) = default;
};

struct PoseUpdate {
  RoomPose pose;
  friend bool operator==(const PoseUpdate&, const PoseUpdate&) = default;
};

struct InferenceError {
  UtteranceId utterance;
  std::string reason;  // ErrorCode name
  std::string detail;
  friend bool operator==(const InferenceError&, const InferenceError&) = default;
};

struct SessionEnded {
  friend bool operator==(const SessionEnded&, const SessionEnded&) = default;
};

}  // namespace event

using EventPayload =
    std::variant<event::UtteranceSubmitted, event::Categorized, event::IslandCreated,
                 event::TreeAdded, event::DiveIn, event::DiveOut, event::WalkTeleport,
                 event::PoseUpdate, event::InferenceError, event::SessionEnded>;

enum class EventKind {
  UtteranceSubmitted,
  Categorized,
  IslandCreated,
  TreeAdded,
  DiveIn,
  DiveOut,
  WalkTeleport,
  PoseUpdate,
  InferenceError,
  SessionEnded,
};

inline constexpr std::string_view kEventKindNames[] = {
    "UtteranceSubmitted", "Categorized", "IslandCreated", "TreeAdded",      "DiveIn",
    "DiveOut",            "WalkTeleport", "PoseUpdate",   "InferenceError", "SessionEnded",
};

static_assert(std::size(kEventKindNames) == std::variant_size_v<EventPayload>);

inline std::string_view to_string(EventKind kind) {
  return kEventKindNames[static_cast<std::size_t>(kind)];
}

struct SessionEvent {
  std::uint64_t seq = 0;
  double t = 0.0;
  EventPayload payload;

  EventKind kind() const { return static_cast<EventKind>(payload.index()); }

  template <typename T>
  const T* as() const { return std::get_if<T>(&payload); }

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

}  // namespace idea_islands
