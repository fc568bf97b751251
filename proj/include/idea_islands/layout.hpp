#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "idea_islands/core/error.hpp"
#include "idea_islands/core/model.hpp"

namespace idea_islands::layout {

inline constexpr double kSlotSpacing = std::numbers::pi / 4.0;  // 45 degrees
inline constexpr double kSecondRingScale = 1.8;
inline constexpr double kSecondRingOffset = std::numbers::pi / 8.0;  // 22.5 degrees

inline void validate(const LayoutParams& p) {
  if (!(p.island_radius_body > 0 && p.island_radius_mini > 0 && p.pathway_radius_ratio > 0 &&
        p.overview_ring_radius > 0 && p.orb_activation_radius > 0 && p.overview_scale > 0))
    throw Error(ErrorCode::InvalidArgument, "layout radii and scales must be positive");
  if (p.pathway_radius_ratio + 0.15 >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "tree ring must stay inside the island radius");
  if (p.slots_per_island != kSlotsPerIsland)
    throw Error(ErrorCode::InvalidArgument, "slots_per_island must be 8");
}

// Island k of the overview. Ring r = k / 8 has radius R * (1 + 0.8 r), so the
// second ring sits at 1.8 R; each further ring is rotated by another 22.5
// degrees.
inline Pose2 place_island(std::size_t existing_count, const LayoutParams& params) {
  const auto ring = static_cast<double>(existing_count / kSlotsPerIsland);
  const auto index = static_cast<double>(existing_count % kSlotsPerIsland);
  const double radius = params.overview_ring_radius * (1.0 + (kSecondRingScale - 1.0) * ring);
  const double angle = index * kSlotSpacing + ring * kSecondRingOffset;
  return {unit_at(angle) * radius, 0.0};
}

inline Pathway make_pathway(const LayoutParams& params) {
  return Pathway{params.pathway_radius(), -std::numbers::pi / 2.0};
}

struct TreePlacement {
  Pose2 tree;      // faces the loop
  Pose2 signpost;  // between tree and loop, readable side toward the loop
};

inline TreePlacement place_tree(const Island& island, int slot, const LayoutParams& params) {
  (void)island;
  if (slot < 0 || slot >= params.slots_per_island)
    throw Error(ErrorCode::SlotOutOfRange, "slot " + std::to_string(slot) + " outside 0..7");
  const double angle = slot * kSlotSpacing;
  const double inward = wrap_angle(angle + std::numbers::pi);
  const double signpost_radius = (params.pathway_radius_ratio + 0.075) * params.island_radius_body;
  return {{unit_at(angle) * params.tree_radius(), inward},
          {unit_at(angle) * signpost_radius, inward}};
}

// Orbs for every island other than the one the user is immersed in, expressed
// in world coordinates. Walk places them on the pathway loop; Dive at the rim.
inline std::vector<Orb> place_orbs(const SceneState& state, TransitionMode transition,
                                   const LayoutParams& params) {
  if (!state.mode().is_immersed()) throw Error(ErrorCode::NotImmersed, "orbs exist only while immersed");
  const Island* current = state.find_island(state.mode().island());
  if (!current) throw Error(ErrorCode::UnknownIsland, state.mode().island().str());

  const double radius =
      transition == TransitionMode::Walk ? params.pathway_radius() : params.island_radius_body;
  std::vector<Orb> orbs;
  for (const auto& other : state.islands) {
    if (other.id == current->id) continue;
    const double dir = bearing(current->overview_pose.position, other.overview_pose.position);
    const Vec2 local = unit_at(dir) * radius;
    orbs.push_back({other.id, state.island_placement.apply(local), other.unseen_ideas});
  }
  return orbs;
}

// Placement of `target` that puts its pathway entry exactly under the user,
// with the walking direction along the user's heading. The user stays put.
inline Rigid2 align_for_teleport(const Island& target, const UserPose& user) {
  const double rotation = wrap_angle(user.heading - target.pathway.entry_tangent());
  const Vec2 translation = user.world_position - rotate(target.pathway.entry_point(), rotation);
  return {rotation, translation};
}

inline void check_invertible(const RoomMapping& mapping) {
  if (mapping.scale_factor == 0.0 || !std::isfinite(mapping.scale_factor))
    throw Error(ErrorCode::DegenerateMapping, "scale_factor must be finite and non-zero");
}

inline Vec2 room_to_world(const RoomMapping& mapping, Vec2 room_point) {
  check_invertible(mapping);
  return mapping.to_world(room_point);
}

inline Vec2 world_to_room(const RoomMapping& mapping, Vec2 world_point) {
  check_invertible(mapping);
  return mapping.to_room(world_point);
}

// Body-scale mapping for diving into `island` (placed at the identity): the
// user's current room point lands on the pathway entry, facing along it.
inline RoomMapping recenter_on_entry(const Island& island, Vec2 room_position, double room_heading) {
  RoomMapping m;
  m.scale_factor = 1.0;
  m.rotation = wrap_angle(island.pathway.entry_tangent() - room_heading);
  m.origin_offset = island.pathway.entry_point() - rotate(room_position, m.rotation);
  return m;
}

// Overview mapping: the user's current room point sits over the landscape
// centre, axes aligned with the landscape.
inline RoomMapping recenter_on_overview(Vec2 room_position, const LayoutParams& params) {
  RoomMapping m;
  m.scale_factor = params.overview_scale;
  m.rotation = 0.0;
  m.origin_offset = -(room_position * params.overview_scale);
  return m;
}

// ---- configuration file ---------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view key, std::string_view text) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error(ErrorCode::InvalidArgument, "bad number for " + std::string(key) + ": " + std::string(text));
  return v;
}

}  // namespace detail

// Canonical key=value rendering; also the hashed form.
inline std::string to_config_text(const LayoutParams& p) {
  std::ostringstream out;
  out << "island_radius_body=" << detail::format_double(p.island_radius_body) << '\n'
      << "island_radius_mini=" << detail::format_double(p.island_radius_mini) << '\n'
      << "pathway_radius_ratio=" << detail::format_double(p.pathway_radius_ratio) << '\n'
      << "slots_per_island=" << p.slots_per_island << '\n'
      << "overview_ring_radius=" << detail::format_double(p.overview_ring_radius) << '\n'
      << "orb_activation_radius=" << detail::format_double(p.orb_activation_radius) << '\n'
      << "overview_scale=" << detail::format_double(p.overview_scale) << '\n';
  return out.str();
}

// Lines of `key = value`; '#' starts a comment. Missing keys keep defaults.
inline LayoutParams parse_config_text(std::string_view text) {
  LayoutParams p;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = text::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": expected key=value");
    const auto key = text::trim(view.substr(0, eq));
    const auto value = text::trim(view.substr(eq + 1));
    if (key == "island_radius_body") p.island_radius_body = detail::parse_double(key, value);
    else if (key == "island_radius_mini") p.island_radius_mini = detail::parse_double(key, value);
    else if (key == "pathway_radius_ratio") p.pathway_radius_ratio = detail::parse_double(key, value);
    else if (key == "slots_per_island") p.slots_per_island = static_cast<int>(detail::parse_double(key, value));
    else if (key == "overview_ring_radius") p.overview_ring_radius = detail::parse_double(key, value);
    else if (key == "orb_activation_radius") p.orb_activation_radius = detail::parse_double(key, value);
    else if (key == "overview_scale") p.overview_scale = detail::parse_double(key, value);
    else throw Error(ErrorCode::InvalidArgument, "unknown layout key: " + std::string(key));
  }
  validate(p);
  return p;
}

inline LayoutParams load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open layout params file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// FNV-1a over the canonical text, as 16 hex digits.
inline std::string params_hash(const LayoutParams& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_config_text(p)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace idea_islands::layout
