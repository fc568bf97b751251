#pragma once

#include <span>
#include <string>
#include <vector>

#include "idea_islands/organizer/topic.hpp"

namespace idea_islands::organizer {

inline constexpr std::string_view kFormatRule =
    "Output must be a single-line string in the format: CATEGORY;SUMMARY";

// Seeds first, then live categories in creation order; live entries whose
// normalized name matches a seed are not repeated.
inline std::vector<std::string> prompt_categories(const TopicConfig& config,
                                                  std::span<const CategoryLabel> live) {
  std::vector<CategoryLabel> merged = config.seed_categories;
  for (const auto& c : live) {
    bool seen = false;
    for (const auto& m : merged) seen = seen || m == c;
    if (!seen) merged.push_back(c);
  }
  std::vector<std::string> names;
  names.reserve(merged.size());
  for (const auto& c : merged) names.push_back(c.display());
  return names;
}

// ["A", "B"], the list notation the few-shot examples use.
inline std::string render_category_list(std::span<const std::string> names) {
  std::string out = "[";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += '"';
    for (char c : names[i]) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    out += '"';
  }
  return out + "]";
}

namespace detail {

inline void render_block(std::string& out, const std::string& topic, const std::string& categories,
                         const std::string& transcript, const std::string& output) {
  out += "Topic: " + topic + "\n";
  out += "Categories: " + categories + "\n";
  out += "Transcript: " + transcript + "\n";
  out += "Output:";
  if (!output.empty()) out += " " + output;
}

}  // namespace detail

// Few-shot prompt: prefix rules, each example as a Topic/Categories/
// Transcript/Output block, then the live query with an open Output line.
// Blocks are separated by blank lines.
inline std::string build_prompt(const TopicConfig& config, std::span<const CategoryLabel> current_categories,
                                const std::string& transcript) {
  const auto trimmed = text::trim(transcript);
  if (trimmed.empty()) throw Error(ErrorCode::EmptyTranscript, "transcript is blank");

  std::string out = config.prefix_rules;
  out += "\n\n";
  for (const auto& ex : config.few_shot_examples) {
    detail::render_block(out, ex.topic, render_category_list(ex.categories), ex.transcript, ex.output);
    out += "\n\n";
  }
  const auto names = prompt_categories(config, current_categories);
  detail::render_block(out, config.topic_name, render_category_list(names), std::string(trimmed), "");
  return out;
}

// Prompt for the single retry after an unparseable answer.
inline std::string with_repair_notice(const std::string& prompt, const std::string& bad_output) {
  return prompt + "\n\nThe previous answer \"" + bad_output +
         "\" did not follow the required format.\n" + std::string(kFormatRule) +
         "\nOutput:";
}

}  // namespace idea_islands::organizer
