// Internal text helpers shared by the file parsers (not installed).
#ifndef CASCADE_SRC_TEXT_UTIL_HPP
#define CASCADE_SRC_TEXT_UTIL_HPP

#include <charconv>
#include <optional>
#include <string>

namespace cascade::detail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Locale-independent decimal parsing; the literal maps to the nearest double.
// The whole token must be consumed. A leading '+' is accepted.
inline std::optional<double> parse_double(const std::string& token) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  if (first == last) return std::nullopt;
  double value = 0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

}  // namespace cascade::detail

#endif
