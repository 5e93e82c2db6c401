#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ricci {

enum class ErrorCode {
  ParseError,
  DuplicateEdge,
  InvalidWeight,
  SelfLoop,
  InvalidScale,
  InvalidDistance,
  Unreachable,
  MassImbalance,
  OracleTooLarge,
  DegenerateNeighborhood,
  IncompleteMatrix,
  DualInfeasible,
  DegenerateState,
  NotConnected,
  InvalidParams,
  InvalidMethod,
  MissingGroup,
  MethodMismatch,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every domain failure in the library is reported through this type; the
// CLI maps ErrorCode::Io to exit status 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ricci
