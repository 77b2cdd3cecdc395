#include "provcirc/error.hpp"

namespace provcirc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownSemiring: return "UnknownSemiring";
    case ErrorCode::MixedSemiring: return "MixedSemiring";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::EmptyProgram: return "EmptyProgram";
    case ErrorCode::UnsafeRule: return "UnsafeRule";
    case ErrorCode::UndeclaredTarget: return "UndeclaredTarget";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::NotStable: return "NotStable";
    case ErrorCode::LimitExceeded: return "LimitExceeded";
    case ErrorCode::MissingAssignment: return "MissingAssignment";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::DepthBudgetExceeded: return "DepthBudgetExceeded";
    case ErrorCode::InvalidCircuit: return "InvalidCircuit";
    case ErrorCode::NotLayered: return "NotLayered";
    case ErrorCode::NotFinite: return "NotFinite";
    case ErrorCode::NotLeftLinear: return "NotLeftLinear";
    case ErrorCode::NotChain: return "NotChain";
    case ErrorCode::EpsilonProduction: return "EpsilonProduction";
    case ErrorCode::NotRegularForm: return "NotRegularForm";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::FiniteLanguage: return "FiniteLanguage";
    case ErrorCode::InvalidDecomposition: return "InvalidDecomposition";
    case ErrorCode::VEmpty: return "VEmpty";
    case ErrorCode::DisconnectedCQ: return "DisconnectedCQ";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace provcirc
