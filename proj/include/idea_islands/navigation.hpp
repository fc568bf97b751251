#pragma once

#include <optional>
#include <vector>

#include "idea_islands/core/events.hpp"
#include "idea_islands/core/fold.hpp"
#include "idea_islands/layout.hpp"

namespace idea_islands::navigation {

inline constexpr double kPoseLogInterval = 0.1;  // seconds between logged poses
inline constexpr double kFadeSeconds = 0.8;

struct VisibilityRule {
  double max_distance = 1.5;
  double max_facing_angle = degrees(30.0);

  friend bool operator==(const VisibilityRule&, const VisibilityRule&) = default;
};

struct DwellSegment {
  Mode location = Mode::overview();
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  friend bool operator==(const DwellSegment&, const DwellSegment&) = default;
};

// Live navigation controller for one session. Unlike SceneState it sees every
// pose sample, including the ones the throttle keeps out of the log.
struct NavState {
  Mode mode = Mode::overview();
  RoomMapping mapping;
  Rigid2 island_placement;
  UserPose user;

  std::vector<DwellSegment> closed_segments;
  Mode current_location = Mode::overview();
  double current_start = 0.0;

  double now = 0.0;
  std::optional<double> last_logged_pose_t;

  static NavState initial(const LayoutParams& params) {
    NavState n;
    n.mapping.scale_factor = params.overview_scale;
    n.user = UserPose::from_room({}, 0.0, n.mapping, Mode::overview());
    return n;
  }

  // Segments covering [0, at); the open segment is closed at `at`.
  std::vector<DwellSegment> dwell_segments(double at) const {
    auto out = closed_segments;
    out.push_back({current_location, current_start, std::max(at, current_start)});
    return out;
  }
  std::vector<DwellSegment> dwell_segments() const { return dwell_segments(now); }

  friend bool operator==(const NavState&, const NavState&) = default;
};

struct Transition {
  NavState state;
  SessionEvent event;  // seq is assigned by the caller's log
};

namespace detail {

inline void advance_clock(NavState& n, double t) {
  if (t < n.now)
    throw Error(ErrorCode::TimeRegression, "t=" + std::to_string(t) + " < " + std::to_string(n.now));
  n.now = t;
}

inline void switch_segment(NavState& n, Mode location, double t) {
  n.closed_segments.push_back({n.current_location, n.current_start, t});
  n.current_location = location;
  n.current_start = t;
}

inline event::RoomPose room_pose(const NavState& n) {
  return {n.user.room_position, n.user.room_heading(n.mapping)};
}

}  // namespace detail

inline Transition dive_in(const NavState& state, const SceneState& scene, IslandId island_id, double t) {
  if (!state.mode.is_overview()) throw Error(ErrorCode::NotInOverview, "already immersed");
  const Island* island = scene.find_island(island_id);
  if (!island) throw Error(ErrorCode::UnknownIsland, island_id.str());

  NavState next = state;
  detail::advance_clock(next, t);
  const auto pose = detail::room_pose(state);
  next.mode = Mode::immersed(island_id);
  next.mapping = layout::recenter_on_entry(*island, pose.position, pose.heading);
  next.island_placement = Rigid2::identity();
  next.user = UserPose::from_room(pose.position, pose.heading, next.mapping, next.mode);
  detail::switch_segment(next, next.mode, t);
  SessionEvent ev{0, t, event::DiveIn{island_id, next.mapping, pose}};
  return {std::move(next), std::move(ev)};
}

inline Transition dive_out(const NavState& state, const SceneState& scene, double t) {
  if (!state.mode.is_immersed()) throw Error(ErrorCode::NotImmersed, "already in overview");

  NavState next = state;
  detail::advance_clock(next, t);
  const auto pose = detail::room_pose(state);
  const IslandId from = state.mode.island();
  next.mode = Mode::overview();
  next.mapping = layout::recenter_on_overview(pose.position, scene.layout);
  next.island_placement = Rigid2::identity();
  next.user = UserPose::from_room(pose.position, pose.heading, next.mapping, next.mode);
  detail::switch_segment(next, next.mode, t);
  SessionEvent ev{0, t, event::DiveOut{from, next.mapping, pose}};
  return {std::move(next), std::move(ev)};
}

// Orb ids are the ids of the islands they stand for.
inline Transition walk_teleport(const NavState& state, const SceneState& scene, IslandId orb_id, double t) {
  if (!state.mode.is_immersed()) throw Error(ErrorCode::NotImmersed, "teleport needs an immersed user");
  const Island* target = scene.find_island(orb_id);
  if (!target) throw Error(ErrorCode::UnknownIsland, orb_id.str());

  SceneState view = scene;
  view.user.mode = state.mode;
  view.island_placement = state.island_placement;
  const auto orbs = layout::place_orbs(view, scene.transition, scene.layout);
  const Orb* orb = nullptr;
  for (const auto& o : orbs)
    if (o.target == orb_id) orb = &o;
  if (!orb) throw Error(ErrorCode::OrbOutOfRange, "no orb for " + orb_id.str() + " here");
  const double gap = distance(state.user.world_position, orb->position);
  if (gap > scene.layout.orb_activation_radius)
    throw Error(ErrorCode::OrbOutOfRange, "orb " + orb_id.str() + " is " + std::to_string(gap) + " m away");

  NavState next = state;
  detail::advance_clock(next, t);
  const auto pose = detail::room_pose(state);
  const IslandId from = state.mode.island();
  next.mode = Mode::immersed(orb_id);
  next.island_placement = layout::align_for_teleport(*target, state.user);
  next.user.mode = next.mode;
  detail::switch_segment(next, next.mode, t);
  SessionEvent ev{0, t, event::WalkTeleport{from, orb_id, next.island_placement, pose, kFadeSeconds}};
  return {std::move(next), std::move(ev)};
}

struct PoseResult {
  NavState state;
  std::optional<SessionEvent> event;  // absent when throttled
};

inline PoseResult update_pose(const NavState& state, event::RoomPose pose, double t) {
  NavState next = state;
  detail::advance_clock(next, t);
  next.user = UserPose::from_room(pose.position, pose.heading, next.mapping, next.mode);
  if (next.last_logged_pose_t && t - *next.last_logged_pose_t < kPoseLogInterval - 1e-9)
    return {std::move(next), std::nullopt};
  next.last_logged_pose_t = t;
  return {std::move(next), SessionEvent{0, t, event::PoseUpdate{pose}}};
}

// Pop-ups in overview are always shown; immersed signposts need the user close
// and looking toward them.
inline bool signpost_visible(const UserPose& user, const Pose2& signpost, const VisibilityRule& rule = {}) {
  if (user.mode.is_overview()) return true;
  const double gap = distance(user.world_position, signpost.position);
  if (gap > rule.max_distance) return false;
  if (gap == 0.0) return true;
  return angle_between(user.heading, bearing(user.world_position, signpost.position)) <= rule.max_facing_angle;
}

// Signposts of the immersed island that `user` can currently read.
inline std::vector<TreeId> visible_signposts(const SceneState& scene, const UserPose& user,
                                             const VisibilityRule& rule = {}) {
  std::vector<TreeId> out;
  if (!user.mode.is_immersed()) return out;
  const Island* island = scene.find_island(user.mode.island());
  if (!island) return out;
  for (const auto& tree : island->trees) {
    if (tree.slot.is_overflow()) continue;
    const auto placed = layout::place_tree(*island, tree.slot.index(), scene.layout);
    if (signpost_visible(user, scene.island_placement.apply(placed.signpost), rule)) out.push_back(tree.id);
  }
  return out;
}

}  // namespace idea_islands::navigation
