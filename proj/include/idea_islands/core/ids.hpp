#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace idea_islands {

template <typename Tag>
struct Id {
  std::uint64_t value = 0;

  friend constexpr auto operator<=>(Id, Id) = default;
  std::string str() const { return std::string(Tag::prefix) + std::to_string(value); }
};

struct IslandTag { static constexpr const char* prefix = "island-"; };
struct TreeTag { static constexpr const char* prefix = "tree-"; };
struct UtteranceTag { static constexpr const char* prefix = "u-"; };

using IslandId = Id<IslandTag>;
using TreeId = Id<TreeTag>;
using UtteranceId = Id<UtteranceTag>;

}  // namespace idea_islands

template <typename Tag>
struct std::hash<idea_islands::Id<Tag>> {
  std::size_t operator()(idea_islands::Id<Tag> id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
