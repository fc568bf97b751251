#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "idea_islands/core/fold.hpp"
#include "idea_islands/layout.hpp"
#include "idea_islands/organizer/parse.hpp"
#include "idea_islands/organizer/prompt.hpp"
#include "idea_islands/organizer/provider.hpp"

namespace idea_islands::organizer {

struct OrganizerOptions {
  std::chrono::milliseconds call_deadline{2500};
  int timeout_retries = 1;
  int repair_retries = 1;
};

// What came back from the provider stage for one utterance.
struct Inference {
  std::optional<ParsedOutput> parsed;
  std::string raw;
  std::optional<ErrorCode> error;
  std::string error_detail;
  int attempts = 0;
};

// Calls the provider until it yields a parseable line, allowing one retry
// after a timeout/failure and one repair retry (format rule restated) after an
// unparseable answer.
inline Inference infer(const InferenceRequest& request, InferenceProvider& provider,
                       const OrganizerOptions& options = {}) {
  using clock = std::chrono::steady_clock;
  Inference result;
  InferenceRequest current = request;
  int timeouts_left = options.timeout_retries;
  int repairs_left = options.repair_retries;

  while (true) {
    ++result.attempts;
    const auto started = clock::now();
    try {
      result.raw = provider.complete(current, options.call_deadline);
      if (clock::now() - started > options.call_deadline)
        throw Error(ErrorCode::ProviderTimeout, "answer arrived after the deadline");
    } catch (const Error& err) {
      if (timeouts_left-- > 0) continue;
      result.error = err.code() == ErrorCode::ProviderFailure ? ErrorCode::ProviderFailure
                                                               : ErrorCode::ProviderTimeout;
      result.error_detail = err.detail();
      return result;
    }

    try {
      result.parsed = parse_output(result.raw);
      result.error.reset();
      return result;
    } catch (const Error& err) {
      if (repairs_left-- > 0) {
        current.prompt = with_repair_notice(request.prompt, result.raw);
        continue;
      }
      result.error = ErrorCode::ParseFailure;
      result.error_detail = err.what();
      return result;
    }
  }
}

enum class IslandAction { Created, Reused };

struct OrganizeResult {
  CategoryLabel category;
  std::string summary;
  IslandAction island_action = IslandAction::Reused;
  WordCountFlags flags;
};

struct Applied {
  std::optional<OrganizeResult> result;  // empty when the inference failed
  std::vector<SessionEvent> events;      // seq numbered after state.last_seq
};

inline IslandId next_island_id(const SceneState& s) { return IslandId{s.islands.size() + 1}; }

inline TreeId next_tree_id(const SceneState& s) {
  std::uint64_t n = 0;
  for (const auto& island : s.islands) n += island.trees.size();
  return TreeId{n + 1};
}

inline TreeSlot next_slot(const Island& island) {
  const int placed = island.placed_tree_count();
  return placed < kSlotsPerIsland ? TreeSlot::at(placed) : TreeSlot::overflow();
}

// Turns an inference into log events against the landscape as it stands now:
// Categorized, IslandCreated when the category is new, TreeAdded. A failed
// inference becomes a single InferenceError and leaves the landscape alone.
inline Applied apply_inference(const SceneState& state, UtteranceId utterance, const Inference& inference,
                               double t) {
  Applied out;
  std::uint64_t seq = state.last_seq;
  auto push = [&](EventPayload payload) { out.events.push_back({++seq, t, std::move(payload)}); };

  if (!inference.parsed) {
    push(event::InferenceError{utterance,
                               std::string(to_string(inference.error.value_or(ErrorCode::ParseFailure))),
                               inference.error_detail});
    return out;
  }

  const ParsedOutput& parsed = *inference.parsed;
  push(event::Categorized{utterance, parsed.category.display(), parsed.summary, inference.raw, parsed.flags});

  const Island* island = state.find_island(parsed.category);
  IslandAction action = IslandAction::Reused;
  IslandId island_id;
  TreeSlot slot = TreeSlot::at(0);
  if (island) {
    island_id = island->id;
    slot = next_slot(*island);
  } else {
    action = IslandAction::Created;
    island_id = next_island_id(state);
    push(event::IslandCreated{island_id, parsed.category.display(),
                              layout::place_island(state.islands.size(), state.layout)});
  }
  push(event::TreeAdded{next_tree_id(state), island_id, utterance, parsed.summary, slot});
  out.result = OrganizeResult{parsed.category, parsed.summary, action, parsed.flags};
  return out;
}

inline InferenceRequest make_request(const TopicConfig& config, const SceneState& state,
                                     const std::string& transcript) {
  const auto live = state.categories();
  return {build_prompt(config, live, transcript), std::string(text::trim(transcript))};
}

// Synchronous pipeline for one already-submitted utterance.
inline Applied organize(UtteranceId utterance, const SceneState& state, InferenceProvider& provider,
                        const TopicConfig& config, double t, const OrganizerOptions& options = {}) {
  const UtteranceRecord* record = state.find_utterance(utterance);
  if (!record || record->status != IdeaStatus::Pending)
    throw Error(ErrorCode::InvalidReference, "utterance " + utterance.str() + " is not pending");
  const auto inference = infer(make_request(config, state, record->transcript), provider, options);
  return apply_inference(state, utterance, inference, t);
}

// Releases completions in ticket order regardless of completion order. Not
// synchronized; the owning session serializes access.
template <typename T>
class ReorderBuffer {
 public:
  std::uint64_t reserve() { return next_ticket_++; }

  void complete(std::uint64_t ticket, T value) {
    if (ticket < next_release_ || ticket >= next_ticket_ || ready_.contains(ticket))
      throw Error(ErrorCode::InvalidArgument, "bad reorder ticket " + std::to_string(ticket));
    ready_.emplace(ticket, std::move(value));
  }

  std::vector<T> drain() {
    std::vector<T> out;
    for (auto it = ready_.find(next_release_); it != ready_.end(); it = ready_.find(next_release_)) {
      out.push_back(std::move(it->second));
      ready_.erase(it);
      ++next_release_;
    }
    return out;
  }

  std::size_t in_flight() const { return next_ticket_ - next_release_; }

 private:
  std::uint64_t next_ticket_ = 0;
  std::uint64_t next_release_ = 0;
  std::map<std::uint64_t, T> ready_;
};

}  // namespace idea_islands::organizer
