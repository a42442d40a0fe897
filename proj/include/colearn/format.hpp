#pragma once

#include <charconv>
#include <string>

namespace colearn {

// Shortest round-trip decimal form; locale independent.
inline std::string to_text(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

// Fixed notation with the given number of decimals; locale independent.
inline std::string to_fixed(double value, int decimals) {
  char buf[512];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
  return std::string(buf, end);
}

}  // namespace colearn
