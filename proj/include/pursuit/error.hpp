#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pursuit {

enum class ErrorKind {
  kDegeneratePosition,
  kInvalidSpeedRatio,
  kRingUndefined,
  kInvalidGain,
  kPotentialOverflow,
  kAlreadyCaptured,
  kNotApplicable,
  kValidation,
  kParse,
  kIo,
  kInvariantViolation,
};

// Stable, machine-readable name of an error category. The CLI prints these.
std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pursuit
