#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "idea_islands/core/fold.hpp"
#include "idea_islands/navigation.hpp"

namespace idea_islands::metrics {

struct IdeaRecord {
  UtteranceId utterance;
  double t = 0.0;
  std::optional<CategoryLabel> category;           // set only once categorized
  Mode location = Mode::overview();                // at submission time
  std::optional<CategoryLabel> location_category;  // category of that island
  std::optional<double> originality;               // external annotation

  bool categorized() const { return category.has_value(); }
};

struct Guilford {
  std::size_t fluency = 0;
  std::size_t flexibility = 0;
  double persistence = 0.0;

  friend bool operator==(const Guilford&, const Guilford&) = default;
};

inline Guilford guilford(std::span<const IdeaRecord> ideas) {
  Guilford g;
  std::unordered_set<std::string> categories;
  for (const auto& idea : ideas) {
    if (!idea.categorized()) continue;
    ++g.fluency;
    categories.insert(idea.category->key());
  }
  g.flexibility = categories.size();
  g.persistence = g.flexibility ? static_cast<double>(g.fluency) / static_cast<double>(g.flexibility) : 0.0;
  return g;
}

struct SwitchStats {
  std::size_t switches = 0;
  double per_minute = 0.0;

  friend bool operator==(const SwitchStats&, const SwitchStats&) = default;
};

// Adjacent categorized ideas (in time order) with different categories.
inline SwitchStats switch_rate(std::span<const IdeaRecord> ideas, double duration_seconds) {
  if (!(duration_seconds > 0.0)) throw Error(ErrorCode::NonPositiveDuration, std::to_string(duration_seconds));
  SwitchStats s;
  const CategoryLabel* previous = nullptr;
  for (const auto& idea : ideas) {
    if (!idea.categorized()) continue;
    if (previous && !(*previous == *idea.category)) ++s.switches;
    previous = &*idea.category;
  }
  s.per_minute = static_cast<double>(s.switches) / (duration_seconds / 60.0);
  return s;
}

struct SscReport {
  std::size_t matched = 0;
  std::size_t in_island = 0;
  std::optional<double> rate;

  friend bool operator==(const SscReport&, const SscReport&) = default;
};

// Share of in-island ideas whose category is the island's own.
inline SscReport ssc(std::span<const IdeaRecord> ideas) {
  SscReport r;
  for (const auto& idea : ideas) {
    if (!idea.categorized() || idea.location.is_overview()) continue;
    ++r.in_island;
    if (idea.location_category && *idea.location_category == *idea.category) ++r.matched;
  }
  if (r.in_island) r.rate = static_cast<double>(r.matched) / static_cast<double>(r.in_island);
  return r;
}

struct ShareReport {
  std::size_t in_island = 0;
  std::size_t total = 0;
  std::optional<double> rate;

  friend bool operator==(const ShareReport&, const ShareReport&) = default;
};

inline ShareReport in_island_share(std::span<const IdeaRecord> ideas) {
  ShareReport r;
  for (const auto& idea : ideas) {
    if (!idea.categorized()) continue;
    ++r.total;
    if (idea.location.is_immersed()) ++r.in_island;
  }
  if (r.total) r.rate = static_cast<double>(r.in_island) / static_cast<double>(r.total);
  return r;
}

using navigation::DwellSegment;

inline constexpr double kPartitionTolerance = 1e-9;

inline void check_partition(std::span<const DwellSegment> segments) {
  if (segments.empty()) throw Error(ErrorCode::IncompletePartition, "no dwell segments");
  double cursor = 0.0;
  for (const auto& s : segments) {
    if (std::abs(s.start - cursor) > kPartitionTolerance || s.end < s.start)
      throw Error(ErrorCode::IncompletePartition,
                  "segment [" + std::to_string(s.start) + ", " + std::to_string(s.end) + ") breaks the partition");
    cursor = s.end;
  }
  if (!(cursor > 0.0)) throw Error(ErrorCode::NonPositiveDuration, "dwell segments cover no time");
}

inline double overview_fraction(std::span<const DwellSegment> segments) {
  check_partition(segments);
  double overview = 0.0;
  for (const auto& s : segments)
    if (s.location.is_overview()) overview += s.length();
  return overview / segments.back().end;
}

inline double immersed_fraction(std::span<const DwellSegment> segments) {
  check_partition(segments);
  double immersed = 0.0;
  for (const auto& s : segments)
    if (s.location.is_immersed()) immersed += s.length();
  return immersed / segments.back().end;
}

struct HalfReport {
  Guilford guilford;
  SwitchStats switches;

  friend bool operator==(const HalfReport&, const HalfReport&) = default;
};

struct Halves {
  HalfReport first;
  HalfReport second;
};

// First half is [0, T/2); an idea at exactly T/2 belongs to the second.
inline Halves temporal_halves(std::span<const IdeaRecord> ideas, double duration_seconds) {
  if (!(duration_seconds > 0.0)) throw Error(ErrorCode::NonPositiveDuration, std::to_string(duration_seconds));
  const double mid = duration_seconds / 2.0;
  std::vector<IdeaRecord> first, second;
  for (const auto& idea : ideas) (idea.t < mid ? first : second).push_back(idea);
  return {{guilford(first), switch_rate(first, mid)}, {guilford(second), switch_rate(second, mid)}};
}

// ---- session-level extraction ---------------------------------------------

using OriginalityAnnotations = std::unordered_map<std::uint64_t, double>;  // utterance id -> score

inline std::vector<IdeaRecord> ideas_from_state(const SceneState& state,
                                                const OriginalityAnnotations& originality = {}) {
  std::vector<IdeaRecord> out;
  out.reserve(state.utterances.size());
  for (const auto& u : state.utterances) {
    IdeaRecord r;
    r.utterance = u.id;
    r.t = u.t;
    if (u.status == IdeaStatus::Categorized) r.category = u.category;
    r.location = u.location;
    if (u.location.is_immersed())
      if (const Island* island = state.find_island(u.location.island())) r.location_category = island->category;
    if (auto it = originality.find(u.id.value); it != originality.end()) r.originality = it->second;
    out.push_back(std::move(r));
  }
  return out;
}

// CSV rows `utterance,score`; the id may be written "u-7" or "7". A first
// row whose score is not numeric is taken as a header.
inline OriginalityAnnotations parse_originality_csv(std::string_view text) {
  OriginalityAnnotations out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text::trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    auto bad = [&] {
      return Error(ErrorCode::InvalidArgument, "originality line " + std::to_string(line_no) + ": expected utterance,score");
    };
    if (comma == std::string_view::npos) throw bad();
    std::string_view id = text::trim(line.substr(0, comma));
    const std::string score_text(text::trim(line.substr(comma + 1)));
    if (id.starts_with("u-")) id.remove_prefix(2);
    std::uint64_t uid = 0;
    double score = 0.0;
    const auto [idp, idec] = std::from_chars(id.data(), id.data() + id.size(), uid);
    const auto [sp, sec] = std::from_chars(score_text.data(), score_text.data() + score_text.size(), score);
    if (idec != std::errc{} || idp != id.data() + id.size() || sec != std::errc{} ||
        sp != score_text.data() + score_text.size()) {
      if (line_no == 1 && out.empty()) continue;
      throw bad();
    }
    out[uid] = score;
  }
  return out;
}

inline double session_duration(std::span<const SessionEvent> events) {
  for (auto it = events.rbegin(); it != events.rend(); ++it)
    if (it->kind() == EventKind::SessionEnded) return it->t;
  return events.empty() ? 0.0 : events.back().t;
}

// Rebuilds the location timeline from transition events, closed at `duration`.
inline std::vector<DwellSegment> dwell_segments_from_log(std::span<const SessionEvent> events, double duration) {
  std::vector<DwellSegment> out;
  DwellSegment current{Mode::overview(), 0.0, 0.0};
  auto switch_to = [&](Mode next, double t) {
    current.end = t;
    out.push_back(current);
    current = {next, t, t};
  };
  for (const auto& ev : events) {
    if (const auto* e = ev.as<event::DiveIn>()) switch_to(Mode::immersed(e->island), ev.t);
    else if (ev.as<event::DiveOut>()) switch_to(Mode::overview(), ev.t);
    else if (const auto* e = ev.as<event::WalkTeleport>()) switch_to(Mode::immersed(e->to), ev.t);
  }
  current.end = std::max(duration, current.start);
  out.push_back(current);
  return out;
}

struct MetricsReport {
  double duration = 0.0;
  Guilford guilford;
  SwitchStats switches;
  ShareReport in_island;
  SscReport ssc;
  std::optional<double> overview_fraction;
  std::optional<double> immersed_fraction;
  std::map<std::string, double> dwell_seconds;  // "overview" or island id
  std::optional<double> originality_total;
  HalfReport first_half;
  HalfReport second_half;
};

inline MetricsReport compute_report(std::span<const IdeaRecord> ideas,
                                    std::span<const DwellSegment> dwell, double duration) {
  MetricsReport r;
  r.duration = duration;
  r.guilford = guilford(ideas);
  r.in_island = in_island_share(ideas);
  r.ssc = ssc(ideas);
  for (const auto& idea : ideas)
    if (idea.categorized() && idea.originality) r.originality_total = r.originality_total.value_or(0.0) + *idea.originality;
  if (duration > 0.0) {
    r.switches = switch_rate(ideas, duration);
    const auto halves = temporal_halves(ideas, duration);
    r.first_half = halves.first;
    r.second_half = halves.second;
    r.overview_fraction = overview_fraction(dwell);
    r.immersed_fraction = immersed_fraction(dwell);
    for (const auto& s : dwell)
      r.dwell_seconds[s.location.is_overview() ? "overview" : s.location.island().str()] += s.length();
  }
  return r;
}

inline MetricsReport report_from_log(const SceneState& initial, std::span<const SessionEvent> events,
                                     const OriginalityAnnotations& originality = {}) {
  const SceneState final_state = fold_all(initial, events);
  const double duration = session_duration(events);
  const auto ideas = ideas_from_state(final_state, originality);
  const auto dwell = dwell_segments_from_log(events, duration);
  return compute_report(ideas, dwell, duration);
}

// ---- serialization --------------------------------------------------------

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string percent(const std::optional<double>& rate) {
  return rate ? fixed(*rate * 100.0, 1) + "%" : std::string("undefined");
}

inline void half_lines(std::string& out, const std::string& prefix, const HalfReport& h) {
  out += prefix + ".fluency=" + std::to_string(h.guilford.fluency) + "\n";
  out += prefix + ".flexibility=" + std::to_string(h.guilford.flexibility) + "\n";
  out += prefix + ".persistence=" + fixed(h.guilford.persistence, 2) + "\n";
  out += prefix + ".switches=" + std::to_string(h.switches.switches) + "\n";
  out += prefix + ".switch_rate=" + fixed(h.switches.per_minute, 2) + "/min\n";
}

inline nlohmann::json half_json(const HalfReport& h) {
  return {{"fluency", h.guilford.fluency},       {"flexibility", h.guilford.flexibility},
          {"persistence", h.guilford.persistence}, {"switches", h.switches.switches},
          {"switch_rate_per_min", h.switches.per_minute}};
}

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

// One `name=value` per line, fixed precision.
inline std::string format_text(const MetricsReport& r) {
  using detail::fixed;
  std::string out;
  out += "duration_s=" + fixed(r.duration, 3) + "\n";
  out += "fluency=" + std::to_string(r.guilford.fluency) + "\n";
  out += "flexibility=" + std::to_string(r.guilford.flexibility) + "\n";
  out += "persistence=" + fixed(r.guilford.persistence, 2) + "\n";
  out += "switches=" + std::to_string(r.switches.switches) + "\n";
  out += "switch_rate=" + fixed(r.switches.per_minute, 2) + "/min\n";
  out += "in_island_ideas=" + std::to_string(r.in_island.in_island) + "\n";
  out += "in_island_share=" + detail::percent(r.in_island.rate) + "\n";
  out += "ssc_matched=" + std::to_string(r.ssc.matched) + "\n";
  out += "ssc_in_island=" + std::to_string(r.ssc.in_island) + "\n";
  out += "ssc=" + detail::percent(r.ssc.rate) + "\n";
  out += "overview_fraction=" + (r.overview_fraction ? fixed(*r.overview_fraction, 6) : "undefined") + "\n";
  out += "immersed_fraction=" + (r.immersed_fraction ? fixed(*r.immersed_fraction, 6) : "undefined") + "\n";
  if (r.originality_total) out += "originality_total=" + fixed(*r.originality_total, 3) + "\n";
  detail::half_lines(out, "first_half", r.first_half);
  detail::half_lines(out, "second_half", r.second_half);
  return out;
}

inline nlohmann::json to_json(const MetricsReport& r) {
  return {
      {"duration_s", r.duration},
      {"fluency", r.guilford.fluency},
      {"flexibility", r.guilford.flexibility},
      {"persistence", r.guilford.persistence},
      {"switches", r.switches.switches},
      {"switch_rate_per_min", r.switches.per_minute},
      {"in_island", {{"ideas", r.in_island.in_island}, {"total", r.in_island.total},
                     {"share", detail::optional_json(r.in_island.rate)}}},
      {"ssc", {{"matched", r.ssc.matched}, {"in_island", r.ssc.in_island},
               {"rate", detail::optional_json(r.ssc.rate)}}},
      {"overview_fraction", detail::optional_json(r.overview_fraction)},
      {"immersed_fraction", detail::optional_json(r.immersed_fraction)},
      {"dwell_seconds", r.dwell_seconds},
      {"originality_total", detail::optional_json(r.originality_total)},
      {"first_half", detail::half_json(r.first_half)},
      {"second_half", detail::half_json(r.second_half)},
  };
}

}  // namespace idea_islands::metrics
