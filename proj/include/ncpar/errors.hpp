#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ncpar {

enum class ErrorCode {
  // configuration / validation
  ConfigError,
  NonHermitian,
  NotElliptic,
  NotPositiveSemidefinite,
  DivisionByZeroB1,
  InvalidDomain,
  ConstraintOnAllDofs,
  SOutOfRange,
  NoOracle,
  TimeOffGrid,
  // numerical
  NotSPD,
  SingularKPlus,
  NoConvergence,
  SingularStepMatrix,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NotElliptic: return "NotElliptic";
    case ErrorCode::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorCode::DivisionByZeroB1: return "DivisionByZeroB1";
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::ConstraintOnAllDofs: return "ConstraintOnAllDofs";
    case ErrorCode::SOutOfRange: return "SOutOfRange";
    case ErrorCode::NoOracle: return "NoOracle";
    case ErrorCode::TimeOffGrid: return "TimeOffGrid";
    case ErrorCode::NotSPD: return "NotSPD";
    case ErrorCode::SingularKPlus: return "SingularKPlus";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularStepMatrix: return "SingularStepMatrix";
  }
  return "Unknown";
}

/// True for failures caused by the numerics rather than by the input data.
inline bool is_numerical(ErrorCode code) {
  return code == ErrorCode::NotSPD || code == ErrorCode::SingularKPlus ||
         code == ErrorCode::NoConvergence || code == ErrorCode::SingularStepMatrix;
}

/// Library exception. Carries a machine-readable code and the module that raised it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string_view module, const std::string& what)
      : std::runtime_error("[" + std::string(module) + "] " + std::string(to_string(code)) +
                           ": " + what),
        code_(code),
        module_(module) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace ncpar
