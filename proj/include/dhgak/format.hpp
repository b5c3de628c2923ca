#pragma once

#include <charconv>
#include <string>

namespace dhgak {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_real(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace dhgak
