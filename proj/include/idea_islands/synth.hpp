#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "idea_islands/organizer/presets.hpp"
#include "idea_islands/service/session.hpp"

// Builds session logs with prescribed idea counts and dwell schedule by
// driving a real Session with a scripted clock and the keyword mock provider.
namespace idea_islands::synth {

struct Params {
  std::size_t ideas = 20;
  std::size_t in_island = 0;               // ideas spoken while immersed
  std::optional<std::size_t> matched;      // in-island ideas whose category is the island's; default all
  std::size_t categories = 4;
  double duration = 600.0;                 // seconds
  std::optional<double> overview_seconds;  // default: proportional to overview ideas
  std::vector<std::string> sequence;       // explicit category per idea, all in overview
  std::uint64_t seed = 1;
  organizer::TopicConfig topic = organizer::presets::study2_sustainability();
  LayoutParams layout;
  TransitionMode transition = TransitionMode::Dive;
  std::string session_id = "synthetic";
  std::string start_timestamp = "2000-01-01T00:00:00Z";
};

struct Result {
  session_log::SessionHeader header;
  std::vector<SessionEvent> events;
  SceneState final_state;
};

namespace detail {

inline std::string keyword(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "tag%03zu", index);
  return buf;
}

struct Plan {
  std::vector<std::string> labels;    // category label per index
  std::vector<std::size_t> overview;  // category index per overview idea
  std::vector<bool> in_matched;       // per in-island idea
  double overview_seconds = 0;
};

inline Plan plan(const Params& p) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidArgument, why); };
  if (!(p.duration > 0)) fail("duration must be positive");
  Plan out;

  if (!p.sequence.empty()) {
    if (p.in_island != 0) fail("a category sequence is spoken in overview only");
    for (const auto& label : p.sequence) {
      const CategoryLabel key(label);
      auto it = std::find_if(out.labels.begin(), out.labels.end(),
                             [&](const std::string& l) { return CategoryLabel(l) == key; });
      if (it == out.labels.end()) {
        out.labels.push_back(label);
        it = out.labels.end() - 1;
      }
      out.overview.push_back(static_cast<std::size_t>(it - out.labels.begin()));
    }
    out.overview_seconds = p.overview_seconds.value_or(p.duration);
    if (out.overview_seconds != p.duration) fail("a category sequence keeps the whole session in overview");
    return out;
  }

  const std::size_t matched = p.matched.value_or(p.in_island);
  if (p.in_island > p.ideas) fail("in_island exceeds ideas");
  if (matched > p.in_island) fail("matched exceeds in_island");
  if (p.categories == 0) fail("need at least one category");
  const std::size_t overview_ideas = p.ideas - p.in_island;
  if (p.in_island > 0 && overview_ideas == 0) fail("in-island ideas need an overview idea to create an island first");
  if (matched < p.in_island && p.categories < 2) fail("mismatched ideas need a second category");

  for (std::size_t i = 0; i < p.categories; ++i)
    out.labels.push_back(i < p.topic.seed_categories.size() ? p.topic.seed_categories[i].display()
                                                            : "Theme " + std::to_string(i + 1));
  for (std::size_t i = 0; i < overview_ideas; ++i) out.overview.push_back(i % p.categories);

  std::mt19937_64 rng(p.seed);
  out.in_matched.assign(p.in_island, false);
  std::fill_n(out.in_matched.begin(), matched, true);
  std::shuffle(out.in_matched.begin(), out.in_matched.end(), rng);

  const double proportional = p.ideas == 0 ? p.duration : p.duration * double(overview_ideas) / double(p.ideas);
  out.overview_seconds = p.overview_seconds.value_or(proportional);
  if (!(out.overview_seconds > 0) || out.overview_seconds > p.duration)
    fail("overview_seconds must lie in (0, duration]");
  if (p.in_island > 0 && out.overview_seconds >= p.duration) fail("in-island ideas need immersed time");
  return out;
}

}  // namespace detail

inline organizer::KeywordTable keyword_table(const std::vector<std::string>& labels) {
  organizer::KeywordTable table;
  for (std::size_t i = 0; i < labels.size(); ++i) table[detail::keyword(i)] = {labels[i], "{keyword} proposal"};
  return table;
}

inline Result generate(const Params& params, const std::optional<std::filesystem::path>& log_path = std::nullopt) {
  const auto plan = detail::plan(params);

  service::SessionConfig config;
  config.session_id = params.session_id;
  config.topic = params.topic;
  config.layout = params.layout;
  config.transition = params.transition;
  config.log_path = log_path;
  config.durability = session_log::Durability::Flush;
  config.start_timestamp = params.start_timestamp;

  double clock = 0;
  auto provider = std::make_shared<organizer::MockProvider>(keyword_table(plan.labels));
  auto session = service::Session::create(config, provider, [&clock] { return clock; });

  std::size_t spoken = 0;
  auto send = [&](service::ClientMessage m) {
    for (const auto& reply : session->handle(m))
      if (const auto* err = reply.as<service::msg::ErrorFrame>())
        throw Error(ErrorCode::InvalidArgument, "synthetic script rejected: " + err->code + " " + err->detail);
  };
  auto say = [&](std::size_t category) {
    send({service::msg::SubmitUtterance{"idea " + std::to_string(++spoken) + " about " + detail::keyword(category)}});
  };
  auto category_of = [&](IslandId island) {
    const auto scene = session->snapshot();
    const CategoryLabel key = scene.find_island(island)->category;
    for (std::size_t i = 0; i < plan.labels.size(); ++i)
      if (CategoryLabel(plan.labels[i]) == key) return i;
    throw Error(ErrorCode::InvalidReference, "island category outside the plan");
  };

  const double ov = plan.overview_seconds;
  for (std::size_t i = 0; i < plan.overview.size(); ++i) {
    clock = ov * (double(i) + 0.5) / double(plan.overview.size());
    say(plan.overview[i]);
  }

  if (ov < params.duration) {
    const auto islands = session->snapshot().islands.size();
    if (islands == 0) throw Error(ErrorCode::InvalidArgument, "no island to dive into");
    const std::size_t total = plan.in_matched.size();
    const std::size_t visits = std::max<std::size_t>(1, std::min(islands, total));
    const double span = (params.duration - ov) / double(visits);
    std::size_t next = 0;
    for (std::size_t v = 0; v < visits; ++v) {
      const double start = ov + span * double(v);
      clock = start;
      if (v > 0) send({service::msg::DiveOut{}});
      const IslandId here{v + 1};
      send({service::msg::DiveIn{here}});
      const std::size_t count = total / visits + (v < total % visits ? 1 : 0);
      for (std::size_t k = 0; k < count; ++k, ++next) {
        clock = start + span * (double(k) + 0.5) / double(count);
        const std::size_t own = category_of(here);
        std::size_t category = own;
        if (!plan.in_matched[next]) {
          const auto live = session->snapshot().islands.size();
          category = live >= 2 ? category_of(IslandId{(here.value % live) + 1}) : (own + 1) % plan.labels.size();
        }
        say(category);
      }
    }
  }

  clock = params.duration;
  send({service::msg::EndSession{}});
  return {session->header(), session->events(), session->snapshot()};
}

}  // namespace idea_islands::synth
