#pragma once

#include <cctype>
#include <string>
#include <string_view>

namespace dxtk {

// Lowercase, trim, and collapse internal whitespace runs to a single space.
// Every label lookup goes through this, so "Melanoma " and "melanoma" name
// the same node.
inline std::string canonical_label(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

inline std::string capitalize_first(std::string_view text) {
  std::string out(text);
  if (!out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

}  // namespace dxtk
