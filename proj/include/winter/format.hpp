#pragma once

#include <charconv>
#include <string>

namespace winter {

/// Shortest decimal form that round-trips to the same double. Locale-free,
/// so CSV outputs are byte-stable across runs and machines.
inline std::string fmt_num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace winter
