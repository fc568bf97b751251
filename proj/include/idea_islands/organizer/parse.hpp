#pragma once

#include <string>
#include <string_view>

#include "idea_islands/core/category.hpp"
#include "idea_islands/core/events.hpp"

namespace idea_islands::organizer {

inline constexpr int kMaxCategoryWords = 3;
inline constexpr int kMaxSummaryWords = 5;

struct ParsedOutput {
  CategoryLabel category;
  std::string summary;
  WordCountFlags flags;
};

inline WordCountFlags check_word_counts(std::string_view category, std::string_view summary) {
  const int cw = text::word_count(category);
  const int sw = text::word_count(summary);
  return {cw < 1 || cw > kMaxCategoryWords, sw < 1 || sw > kMaxSummaryWords};
}

// Splits a provider line on its first ';'. Multi-line answers use the first
// non-blank line.
inline ParsedOutput parse_output(std::string_view raw) {
  std::string_view line;
  while (!raw.empty()) {
    const auto nl = raw.find('\n');
    line = text::trim(raw.substr(0, nl));
    if (!line.empty() || nl == std::string_view::npos) break;
    raw.remove_prefix(nl + 1);
  }
  const auto semi = line.find(';');
  if (semi == std::string_view::npos)
    throw Error(ErrorCode::MissingDelimiter, "no ';' in \"" + std::string(line) + "\"");
  const auto category = text::trim(line.substr(0, semi));
  const auto summary = text::trim(line.substr(semi + 1));
  if (category.empty() || summary.empty())
    throw Error(ErrorCode::EmptySegment, "empty half in \"" + std::string(line) + "\"");
  return {CategoryLabel(category), std::string(summary), check_word_counts(category, summary)};
}

inline std::string format_output(const CategoryLabel& category, std::string_view summary) {
  return category.display() + ";" + std::string(summary);
}

}  // namespace idea_islands::organizer
