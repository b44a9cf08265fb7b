#include "pursuit/error.hpp"

namespace pursuit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDegeneratePosition: return "degenerate_position";
    case ErrorKind::kInvalidSpeedRatio: return "invalid_speed_ratio";
    case ErrorKind::kRingUndefined: return "ring_undefined";
    case ErrorKind::kInvalidGain: return "invalid_gain";
    case ErrorKind::kPotentialOverflow: return "potential_overflow";
    case ErrorKind::kAlreadyCaptured: return "already_captured";
    case ErrorKind::kNotApplicable: return "not_applicable";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kInvariantViolation: return "invariant_violation";
  }
  return "unknown";
}

}  // namespace pursuit
