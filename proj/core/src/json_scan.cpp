#include "docforge/json_scan.hpp"

#include <string>

namespace docforge::json_scan {

std::optional<std::size_t> balanced_end(std::string_view text, std::size_t open) noexcept {
  if (open >= text.size() || (text[open] != '{' && text[open] != '[')) return std::nullopt;
  std::string stack;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    switch (c) {
      case '"': in_string = true; break;
      case '{': stack.push_back('}'); break;
      case '[': stack.push_back(']'); break;
      case '}':
      case ']':
        if (stack.empty() || stack.back() != c) return std::nullopt;
        stack.pop_back();
        if (stack.empty()) return i + 1;
        break;
      default: break;
    }
  }
  return std::nullopt;
}

}  // namespace docforge::json_scan
