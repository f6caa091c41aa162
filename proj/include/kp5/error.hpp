#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kp5 {

enum class ErrorCode {
  InvalidArgument,
  InvalidGrid,
  InvalidField,
  InvalidSpectrum,
  NonIntegerPowerOnSignChangingField,
  WrongMode,
  DegenerateField,
  LocalizationLost,
  Diverged,
  DegenerateInit,
  NotConverged,
  NonFinite,
  NonUniformSampling,
  QuadratureUnresolved,
  LatticeTooLarge,
  InsufficientSamples,
  MissingGroundState,
  NotInJ,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// scenario runners can record it instead of aborting.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace kp5
