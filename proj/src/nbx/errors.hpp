#pragma once

#include <stdexcept>
#include <string>

namespace nbx {

// Error categories; values are shared with the C API status codes.
enum class ErrorKind : int {
  Domain = 1,
  LengthMismatch = 2,
  ToleranceNotReached = 3,
  NonConvergence = 4,
  Divergence = 5,
  Instability = 6,
  IllConditioned = 7,
  OptimizationFailure = 8,
  NotQuasiConcave = 9,
  Config = 10,
  Io = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const char* what) {
  if (!cond) fail(kind, what);
}

}  // namespace nbx
