#include "kp5/error.hpp"

namespace kp5 {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::InvalidSpectrum: return "InvalidSpectrum";
    case ErrorCode::NonIntegerPowerOnSignChangingField: return "NonIntegerPowerOnSignChangingField";
    case ErrorCode::WrongMode: return "WrongMode";
    case ErrorCode::DegenerateField: return "DegenerateField";
    case ErrorCode::LocalizationLost: return "LocalizationLost";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::DegenerateInit: return "DegenerateInit";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonUniformSampling: return "NonUniformSampling";
    case ErrorCode::QuadratureUnresolved: return "QuadratureUnresolved";
    case ErrorCode::LatticeTooLarge: return "LatticeTooLarge";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::MissingGroundState: return "MissingGroundState";
    case ErrorCode::NotInJ: return "NotInJ";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace kp5
