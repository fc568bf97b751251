#pragma once

#include <span>
#include <string>
#include <type_traits>

#include "idea_islands/core/events.hpp"
#include "idea_islands/layout.hpp"

namespace idea_islands {

namespace detail {

[[noreturn]] inline void invalid_reference(const std::string& what) {
  throw Error(ErrorCode::InvalidReference, what);
}

inline UtteranceRecord& pending_utterance(SceneState& s, UtteranceId id) {
  UtteranceRecord* u = s.find_utterance(id);
  if (!u) invalid_reference("unknown utterance " + id.str());
  if (u->status != IdeaStatus::Pending) invalid_reference("utterance " + id.str() + " already resolved");
  return *u;
}

inline Island& existing_island(SceneState& s, IslandId id) {
  Island* island = s.find_island(id);
  if (!island) invalid_reference("unknown island " + id.str());
  return *island;
}

inline void apply(SceneState& s, const event::UtteranceSubmitted& e, double t) {
  if (s.find_utterance(e.utterance)) invalid_reference("duplicate utterance " + e.utterance.str());
  if (text::trim(e.transcript).empty()) throw Error(ErrorCode::EmptyTranscript, e.utterance.str());
  UtteranceRecord record;
  record.id = e.utterance;
  record.t = t;
  record.transcript = e.transcript;
  record.location = s.mode();
  s.utterances.push_back(std::move(record));
}

inline void apply(SceneState& s, const event::Categorized& e, double) {
  UtteranceRecord& u = pending_utterance(s, e.utterance);
  if (text::trim(e.summary).empty()) throw Error(ErrorCode::EmptySegment, "empty summary");
  u.category = CategoryLabel(e.category);
  u.summary = std::string(text::trim(e.summary));
  u.status = IdeaStatus::Categorized;
}

inline void apply(SceneState& s, const event::IslandCreated& e, double t) {
  CategoryLabel category(e.category);
  if (s.find_island(category)) invalid_reference("category already has an island: " + e.category);
  if (s.find_island(e.island)) invalid_reference("duplicate island " + e.island.str());
  s.islands.push_back(Island{e.island, category, {}, e.overview_pose, layout::make_pathway(s.layout),
                             category.display(), t, 0});
}

inline void apply(SceneState& s, const event::TreeAdded& e, double t) {
  Island& island = existing_island(s, e.island);
  UtteranceRecord* u = s.find_utterance(e.utterance);
  if (!u || u->status != IdeaStatus::Categorized || u->tree)
    invalid_reference("tree needs a categorized, unplaced utterance: " + e.utterance.str());
  if (!(u->category == island.category))
    invalid_reference("utterance " + e.utterance.str() + " not categorized into " + island.category.display());
  if (text::trim(e.summary).empty()) throw Error(ErrorCode::EmptySegment, "empty tree summary");
  if (!e.slot.is_overflow()) {
    if (e.slot.index() >= kSlotsPerIsland)
      throw Error(ErrorCode::SlotOutOfRange, "slot " + std::to_string(e.slot.index()));
    for (const auto& tree : island.trees)
      if (tree.slot == e.slot) invalid_reference("slot " + std::to_string(e.slot.index()) + " taken");
  } else if (island.placed_tree_count() < kSlotsPerIsland) {
    invalid_reference("overflow tree while free slots remain");
  }
  island.trees.push_back(Tree{e.tree, e.utterance, e.summary, e.slot, t});
  u->tree = e.tree;
  if (s.mode().is_immersed() && s.mode().island() != island.id) ++island.unseen_ideas;
}

inline void apply(SceneState& s, const event::DiveIn& e, double) {
  if (!s.mode().is_overview()) throw Error(ErrorCode::NotInOverview, "dive-in while immersed");
  Island& island = existing_island(s, e.island);
  layout::check_invertible(e.mapping);
  island.unseen_ideas = 0;
  s.mapping = e.mapping;
  s.island_placement = Rigid2::identity();
  s.user = UserPose::from_room(e.pose.position, e.pose.heading, s.mapping, Mode::immersed(e.island));
}

inline void apply(SceneState& s, const event::DiveOut& e, double) {
  if (!s.mode().is_immersed()) throw Error(ErrorCode::NotImmersed, "dive-out from overview");
  if (s.mode().island() != e.from) invalid_reference("dive-out from " + e.from.str() + " but immersed elsewhere");
  layout::check_invertible(e.mapping);
  s.mapping = e.mapping;
  s.island_placement = Rigid2::identity();
  s.user = UserPose::from_room(e.pose.position, e.pose.heading, s.mapping, Mode::overview());
}

inline void apply(SceneState& s, const event::WalkTeleport& e, double) {
  if (!s.mode().is_immersed()) throw Error(ErrorCode::NotImmersed, "teleport from overview");
  if (s.mode().island() != e.from) invalid_reference("teleport from " + e.from.str() + " but immersed elsewhere");
  Island& target = existing_island(s, e.to);
  target.unseen_ideas = 0;
  s.island_placement = e.placement;
  s.user = UserPose::from_room(e.pose.position, e.pose.heading, s.mapping, Mode::immersed(e.to));
}

inline void apply(SceneState& s, const event::PoseUpdate& e, double) {
  s.user = UserPose::from_room(e.pose.position, e.pose.heading, s.mapping, s.mode());
}

inline void apply(SceneState& s, const event::InferenceError& e, double) {
  pending_utterance(s, e.utterance).status = IdeaStatus::Failed;
}

inline void apply(SceneState& s, const event::SessionEnded&, double) { s.ended = true; }

}  // namespace detail

// Applies one event in place. On error the state is left untouched only for
// the sequencing checks; callers that need strong exception safety use
// fold_event.
inline void fold_in_place(SceneState& state, const SessionEvent& ev) {
  if (ev.seq != state.last_seq + 1)
    throw Error(ErrorCode::SequenceGap, "expected seq " + std::to_string(state.last_seq + 1) +
                                            ", got " + std::to_string(ev.seq));
  if (ev.t < state.last_t || !(ev.t >= 0.0))
    throw Error(ErrorCode::TimeRegression, "event time " + std::to_string(ev.t) + " precedes " +
                                               std::to_string(state.last_t));
  if (state.ended) throw Error(ErrorCode::SessionClosed, "event after SessionEnded");

  std::visit([&](const auto& e) { detail::apply(state, e, ev.t); }, ev.payload);

  state.orbs = state.mode().is_immersed() ? layout::place_orbs(state, state.transition, state.layout)
                                          : std::vector<Orb>{};
  state.last_seq = ev.seq;
  state.last_t = ev.t;
}

inline SceneState fold_event(const SceneState& state, const SessionEvent& ev) {
  SceneState next = state;
  fold_in_place(next, ev);
  return next;
}

inline SceneState fold_all(SceneState state, std::span<const SessionEvent> events) {
  for (const auto& ev : events) fold_in_place(state, ev);
  return state;
}

}  // namespace idea_islands
