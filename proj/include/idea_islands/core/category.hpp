#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>

#include "idea_islands/core/error.hpp"

namespace idea_islands {

namespace text {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Trim, ASCII case-fold, collapse whitespace runs to one space. Bytes outside
// ASCII pass through untouched so any script compares byte-for-byte.
inline std::string normalize(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : trim(s)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    const auto u = static_cast<unsigned char>(c);
    out.push_back(u < 0x80 ? static_cast<char>(std::tolower(u)) : c);
  }
  return out;
}

// A word is a whitespace-delimited token holding at least one letter or digit
// (any non-ASCII byte counts as a letter). Bare "&" or "-" tokens are not words.
inline int word_count(std::string_view s) {
  int words = 0;
  bool in_token = false;
  bool token_has_word_char = false;
  auto close = [&] {
    if (in_token && token_has_word_char) ++words;
    in_token = false;
    token_has_word_char = false;
  };
  for (char c : s) {
    if (is_space(c)) {
      close();
      continue;
    }
    in_token = true;
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x80 || std::isalnum(u)) token_has_word_char = true;
  }
  close();
  return words;
}

}  // namespace text

// Category name as displayed, compared by its normalized form.
class CategoryLabel {
 public:
  explicit CategoryLabel(std::string_view name)
      : display_(text::trim(name)), key_(text::normalize(name)) {
    if (key_.empty()) throw Error(ErrorCode::InvalidArgument, "category name is empty");
  }

  const std::string& display() const noexcept { return display_; }
  const std::string& key() const noexcept { return key_; }
  int word_count() const { return text::word_count(display_); }

  friend bool operator==(const CategoryLabel& a, const CategoryLabel& b) { return a.key_ == b.key_; }

 private:
  std::string display_;
  std::string key_;
};

}  // namespace idea_islands
