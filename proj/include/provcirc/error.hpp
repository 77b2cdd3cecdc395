#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace provcirc {

enum class ErrorCode {
  InvalidArgument,
  UnknownSemiring,
  MixedSemiring,
  Overflow,
  SyntaxError,
  EmptyProgram,
  UnsafeRule,
  UndeclaredTarget,
  ArityMismatch,
  NotStable,
  LimitExceeded,
  MissingAssignment,
  CapExceeded,
  DepthBudgetExceeded,
  InvalidCircuit,
  NotLayered,
  NotFinite,
  NotLeftLinear,
  NotChain,
  EpsilonProduction,
  NotRegularForm,
  UnknownLabel,
  FiniteLanguage,
  InvalidDecomposition,
  VEmpty,
  DisconnectedCQ,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace provcirc
