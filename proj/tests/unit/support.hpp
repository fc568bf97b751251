#pragma once

#include <random>
#include <string>
#include <vector>

#include "idea_islands/idea_islands.hpp"

namespace testing_support {

using namespace idea_islands;

// Appends events with consecutive seq numbers and folds them as it goes.
class Script {
 public:
  explicit Script(SceneState initial = SceneState::initial("test", LayoutParams{}, TransitionMode::Dive))
      : initial_(initial), state_(std::move(initial)) {}

  const SessionEvent& add(double t, EventPayload payload) {
    events_.push_back({state_.last_seq + 1, t, std::move(payload)});
    fold_in_place(state_, events_.back());
    return events_.back();
  }

  // Submitted, categorized, island if new, tree: the organizer's event shape.
  UtteranceId idea(double t, const std::string& category, const std::string& summary = "an idea") {
    const UtteranceId id{++utterances_};
    add(t, event::UtteranceSubmitted{id, "transcript " + std::to_string(id.value)});
    organizer::Inference inf;
    inf.parsed = organizer::ParsedOutput{CategoryLabel(category), summary, {}};
    inf.raw = category + ";" + summary;
    for (auto& ev : organizer::apply_inference(state_, id, inf, t).events) add(ev.t, ev.payload);
    return id;
  }

  void append(const std::vector<SessionEvent>& evs) {
    for (const auto& ev : evs) add(ev.t, ev.payload);
  }

  const SceneState& initial() const { return initial_; }
  const SceneState& state() const { return state_; }
  const std::vector<SessionEvent>& events() const { return events_; }

 private:
  SceneState initial_;
  SceneState state_;
  std::vector<SessionEvent> events_;
  std::uint64_t utterances_ = 0;
};

inline std::string category_name(int i) {
  static const char* names[] = {"Energy Saving", "Transportation", "Eco-Friendly Diet", "Green Spaces",
                                "Digital Monitoring", "Water Use", "Campus Events", "Recycling",
                                "Noise Control", "Lighting", "Local Food", "Repair Cafe"};
  return names[i % 12];
}

}  // namespace testing_support
