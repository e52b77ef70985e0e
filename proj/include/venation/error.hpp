#pragma once

#include <stdexcept>
#include <string>

namespace venation {

enum class ErrorKind {
  InvalidGrid,
  GridMismatch,
  ZeroDenominator,
  NonFinite,
  InvalidParameter,
  Assembly,
  IncompatibleSource,
  NotConverged,
  PivotFailure,
  SingularCoefficient,
  UnsupportedExponent,
  NotFound,
  Config,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit codes used by the command-line front end.
namespace exit_code {
inline constexpr int kSuccess = 0;
inline constexpr int kConfig = 2;
inline constexpr int kNumerical = 3;
inline constexpr int kIo = 4;
}  // namespace exit_code

int exit_code_for(ErrorKind kind);

}  // namespace venation
