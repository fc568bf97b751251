#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <map>
#include <string>
#include <string_view>

#include "idea_islands/core/category.hpp"
#include "idea_islands/organizer/topic.hpp"

namespace idea_islands::organizer {

struct InferenceRequest {
  std::string prompt;
  std::string transcript;
};

// A provider answers one prompt with one line of text before `deadline`
// elapses, or throws Error(ProviderTimeout / ProviderFailure).
class InferenceProvider {
 public:
  virtual ~InferenceProvider() = default;
  virtual std::string complete(const InferenceRequest& request, std::chrono::milliseconds deadline) = 0;
  virtual std::string name() const = 0;
};

struct MockEntry {
  std::string category;
  std::string summary_template;  // "{keyword}" is replaced by the matched keyword
};

using KeywordTable = std::map<std::string, MockEntry>;

inline constexpr std::string_view kDefaultFallback = "Misc;unclassified idea";

// Case-insensitive keyword lookup over the transcript. The longest matching
// keyword wins; equal lengths fall back to the table's key order.
inline std::string mock_provider(std::string_view transcript, const KeywordTable& table,
                                 std::string_view fallback = kDefaultFallback) {
  if (table.empty()) throw Error(ErrorCode::InvalidArgument, "mock keyword table is empty");
  const std::string haystack = text::normalize(transcript);
  const std::pair<const std::string, MockEntry>* best = nullptr;
  for (const auto& entry : table) {
    const std::string needle = text::normalize(entry.first);
    if (needle.empty() || haystack.find(needle) == std::string::npos) continue;
    if (!best || needle.size() > text::normalize(best->first).size()) best = &entry;
  }
  if (!best) return std::string(fallback);

  std::string summary = best->second.summary_template;
  static constexpr std::string_view placeholder = "{keyword}";
  for (auto pos = summary.find(placeholder); pos != std::string::npos; pos = summary.find(placeholder, pos))
    summary.replace(pos, placeholder.size(), best->first);
  return best->second.category + ";" + summary;
}

class MockProvider final : public InferenceProvider {
 public:
  explicit MockProvider(KeywordTable table, std::string fallback = std::string(kDefaultFallback))
      : table_(std::move(table)), fallback_(std::move(fallback)) {
    if (table_.empty()) throw Error(ErrorCode::InvalidArgument, "mock keyword table is empty");
  }

  std::string complete(const InferenceRequest& request, std::chrono::milliseconds) override {
    return mock_provider(request.transcript, table_, fallback_);
  }
  std::string name() const override { return "mock"; }

  const KeywordTable& table() const { return table_; }

 private:
  KeywordTable table_;
  std::string fallback_;
};

// Default mock table for a topic: each seed category answers to its own name
// and to each of its words of four or more letters (first seed wins).
inline KeywordTable keyword_table_for(const TopicConfig& topic) {
  KeywordTable table;
  for (const auto& seed : topic.seed_categories) {
    table.emplace(seed.key(), MockEntry{seed.display(), "{keyword} idea"});
    std::string word;
    const std::string key = seed.key() + " ";
    for (char c : key) {
      if (std::isalnum(static_cast<unsigned char>(c))) {
        word.push_back(c);
        continue;
      }
      if (word.size() >= 4) table.emplace(word, MockEntry{seed.display(), "{keyword} idea"});
      word.clear();
    }
  }
  return table;
}

// Tab-separated `keyword<TAB>category<TAB>summary template`, '#' comments.
inline KeywordTable parse_keyword_table(std::string_view text) {
  KeywordTable table;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (text::trim(line).empty() || text::trim(line).front() == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos)
      throw Error(ErrorCode::InvalidArgument, "keyword table line " + std::to_string(line_no) + ": need 3 columns");
    table[std::string(text::trim(line.substr(0, t1)))] = {
        std::string(text::trim(line.substr(t1 + 1, t2 - t1 - 1))),
        std::string(text::trim(line.substr(t2 + 1)))};
  }
  return table;
}

}  // namespace idea_islands::organizer
