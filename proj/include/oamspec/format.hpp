#pragma once

#include <charconv>
#include <string>

namespace oamspec {

/// Shortest round-trip decimal form; '.' separator regardless of locale.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace oamspec
