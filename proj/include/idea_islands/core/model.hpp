#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "idea_islands/core/category.hpp"
#include "idea_islands/core/geometry.hpp"
#include "idea_islands/core/ids.hpp"

namespace idea_islands {

inline constexpr int kSlotsPerIsland = 8;

enum class TransitionMode { Walk, Dive };

inline const char* to_string(TransitionMode m) { return m == TransitionMode::Walk ? "walk" : "dive"; }

// OVERVIEW, or IMMERSED in one island.
class Mode {
 public:
  static Mode overview() { return Mode{}; }
  static Mode immersed(IslandId island) { return Mode{island}; }

  bool is_overview() const noexcept { return !island_; }
  bool is_immersed() const noexcept { return island_.has_value(); }
  IslandId island() const { return island_.value(); }

  friend bool operator==(const Mode&, const Mode&) = default;

 private:
  Mode() = default;
  explicit Mode(IslandId id) : island_(id) {}
  std::optional<IslandId> island_;
};

class TreeSlot {
 public:
  static constexpr TreeSlot overflow() { return TreeSlot{-1}; }
  static constexpr TreeSlot at(int index) { return TreeSlot{index}; }

  constexpr bool is_overflow() const noexcept { return index_ < 0; }
  constexpr int index() const noexcept { return index_; }

  friend constexpr bool operator==(TreeSlot, TreeSlot) = default;

 private:
  constexpr explicit TreeSlot(int i) : index_(i) {}
  int index_;
};

struct Tree {
  TreeId id;
  UtteranceId utterance;
  std::string summary;
  TreeSlot slot = TreeSlot::overflow();
  double created_at = 0.0;

  friend bool operator==(const Tree&, const Tree&) = default;
};

// Circular walking loop centred on the island, in island-local body-scale
// coordinates. The entry point is where arrivals step onto the loop; walking
// direction is counter-clockwise.
struct Pathway {
  double radius = 0.0;
  double entry_angle = -std::numbers::pi / 2.0;

  Vec2 point_at(double angle) const { return unit_at(angle) * radius; }
  double tangent_at(double angle) const { return wrap_angle(angle + std::numbers::pi / 2.0); }
  Vec2 entry_point() const { return point_at(entry_angle); }
  double entry_tangent() const { return tangent_at(entry_angle); }

  friend bool operator==(const Pathway&, const Pathway&) = default;
};

struct Island {
  IslandId id;
  CategoryLabel category;
  std::vector<Tree> trees;
  Pose2 overview_pose;
  Pathway pathway;
  std::string cloud_label;
  double created_at = 0.0;
  // Ideas added while the user was immersed elsewhere; drives orb pulses.
  int unseen_ideas = 0;

  int placed_tree_count() const {
    int n = 0;
    for (const auto& t : trees) n += t.slot.is_overflow() ? 0 : 1;
    return n;
  }

  friend bool operator==(const Island&, const Island&) = default;
};

struct Orb {
  IslandId target;
  Vec2 position;
  int pulse_count = 0;

  friend bool operator==(const Orb&, const Orb&) = default;
};

// Affine room->world map: rotate, then scale, then offset.
struct RoomMapping {
  Vec2 origin_offset;
  double scale_factor = 1.0;
  double rotation = 0.0;

  Vec2 to_world(Vec2 room) const { return rotate(room, rotation) * scale_factor + origin_offset; }
  Vec2 to_room(Vec2 world) const { return rotate((world - origin_offset) / scale_factor, -rotation); }
  double heading_to_world(double room_heading) const { return wrap_angle(room_heading + rotation); }
  double heading_to_room(double world_heading) const { return wrap_angle(world_heading - rotation); }

  friend bool operator==(const RoomMapping&, const RoomMapping&) = default;
};

struct UserPose {
  Vec2 room_position;
  Vec2 world_position;
  double heading = 0.0;  // world frame
  Mode mode = Mode::overview();

  static UserPose from_room(Vec2 room, double room_heading, const RoomMapping& m, Mode mode) {
    return {room, m.to_world(room), m.heading_to_world(room_heading), mode};
  }
  double room_heading(const RoomMapping& m) const { return m.heading_to_room(heading); }

  friend bool operator==(const UserPose&, const UserPose&) = default;
};

// Geometry calibration. Body-scale radii are sized for a room of roughly
// 6 m x 6 m; mini-scale values describe the overview model.
struct LayoutParams {
  double island_radius_body = 2.5;
  double island_radius_mini = 0.35;
  double pathway_radius_ratio = 0.6;
  int slots_per_island = kSlotsPerIsland;
  double overview_ring_radius = 1.2;
  double orb_activation_radius = 0.5;
  double overview_scale = 1.0;

  double pathway_radius() const { return pathway_radius_ratio * island_radius_body; }
  double tree_radius() const { return (pathway_radius_ratio + 0.15) * island_radius_body; }

  friend bool operator==(const LayoutParams&, const LayoutParams&) = default;
};

enum class IdeaStatus { Pending, Categorized, Failed };

// Ledger entry for one submitted utterance.
struct UtteranceRecord {
  UtteranceId id;
  double t = 0.0;
  std::string transcript;
  Mode location = Mode::overview();  // where the user was at submission
  IdeaStatus status = IdeaStatus::Pending;
  std::optional<CategoryLabel> category;
  std::string summary;
  std::optional<TreeId> tree;

  friend bool operator==(const UtteranceRecord&, const UtteranceRecord&) = default;
};

struct SceneState {
  std::string topic_config_id;
  LayoutParams layout;
  TransitionMode transition = TransitionMode::Dive;

  std::vector<Island> islands;
  std::vector<Orb> orbs;
  UserPose user;
  RoomMapping mapping;
  // island-local -> world for the island the user is immersed in
  Rigid2 island_placement;
  std::vector<UtteranceRecord> utterances;

  std::uint64_t last_seq = 0;
  double last_t = 0.0;
  bool ended = false;

  Mode mode() const { return user.mode; }

  const Island* find_island(IslandId id) const {
    for (const auto& island : islands)
      if (island.id == id) return &island;
    return nullptr;
  }
  Island* find_island(IslandId id) {
    for (auto& island : islands)
      if (island.id == id) return &island;
    return nullptr;
  }
  const Island* find_island(const CategoryLabel& category) const {
    for (const auto& island : islands)
      if (island.category == category) return &island;
    return nullptr;
  }
  const UtteranceRecord* find_utterance(UtteranceId id) const {
    for (const auto& u : utterances)
      if (u.id == id) return &u;
    return nullptr;
  }
  UtteranceRecord* find_utterance(UtteranceId id) {
    for (auto& u : utterances)
      if (u.id == id) return &u;
    return nullptr;
  }

  std::vector<CategoryLabel> categories() const {
    std::vector<CategoryLabel> out;
    out.reserve(islands.size());
    for (const auto& island : islands) out.push_back(island.category);
    return out;
  }

  static SceneState initial(std::string topic_config_id, LayoutParams layout,
                            TransitionMode transition) {
    SceneState s;
    s.topic_config_id = std::move(topic_config_id);
    s.layout = layout;
    s.transition = transition;
    s.mapping.scale_factor = layout.overview_scale;
    s.user = UserPose::from_room({}, 0.0, s.mapping, Mode::overview());
    return s;
  }

  friend bool operator==(const SceneState&, const SceneState&) = default;
};

}  // namespace idea_islands
