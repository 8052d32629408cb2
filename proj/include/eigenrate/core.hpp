#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace eigenrate {

/// Physical or reference coordinate; component 1 is ignored in 1D.
using Point = std::array<double, 2>;

/// Contract violation by the caller (bad argument, unsupported combination).
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

/// Internal failure (conditioning, convergence, I/O).
[[noreturn]] inline void fail(const std::string& msg) { throw std::runtime_error(msg); }

inline void ensure(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

}  // namespace eigenrate
