#pragma once

#include <stdexcept>
#include <string>

namespace macrostate {

enum class ErrorKind {
  parse,
  format,
  conflict,
  alignment,
  dimension,
  insufficient_data,
  domain,
  unknown_feature,
  normalization,
  argument,
  data,
  kind,
  feasibility,
  io,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the toolkit; `kind()` tells callers which
/// contract was violated without a class per failure mode.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string("[") + to_string(kind) + "] " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace macrostate
