#pragma once

#include <charconv>
#include <string>

namespace lrcast {

/// Shortest decimal text that parses back to exactly `x`.
inline std::string format_real(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace lrcast
