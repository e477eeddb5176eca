#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace qconcat {

// Bad arguments, malformed files, size mismatches. The CLI maps this to exit
// code 2.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// Non-convergence, insufficient precision, ill-conditioning. The CLI maps this
// to exit code 3.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

// Compact %g rendering of a double for messages.
inline std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

}  // namespace qconcat
