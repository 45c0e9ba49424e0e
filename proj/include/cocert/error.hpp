#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cocert {

enum class ErrorCode {
  UnknownGenerator,
  RuleLoopGuard,
  BackendMismatch,
  SizeCapExceeded,
  NotFiniteUnderCap,
  UnknownHom,
  InvalidDescriptor,
  DimMismatch,
  NonpositiveWeight,
  ParseError,
  MissingFace,
  BadOrbitRef,
  ChainConditionViolated,
  DegreeOutOfRange,
  InvalidRepresentation,
  FloatModeUnsupported,
  NotSymmetric,
  NotPsd,
  SupportTooSmall,
  InvalidSupport,
  MalformedCert,
};

/// Machine-readable name, e.g. "CHAIN_CONDITION_VIOLATED".
std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cocert
