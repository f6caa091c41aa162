#pragma once

#include <complex>
#include <string>

namespace kp5 {

/// Fourier multipliers m(xi, mu). Symbols with a 1/xi factor vanish at xi = 0.
struct Symbol {
  enum class Kind {
    Dx,         // i xi
    Dx2,        // -xi^2
    Dx4,        // xi^4
    Dx5,        // i xi^5
    DxInvDy,    // mu / xi
    DxInv2Dy2,  // mu^2 / xi^2
    DxInvDy2,   // i mu^2 / xi
    Dy,         // i mu
    AbsDxPow,   // |xi|^s
    JxPow,      // (1 + xi^2)^(s/2)
    Dispersion  // i (xi^5 + mu^2 / xi)
  };

  Kind kind;
  double s = 0.0;

  static Symbol abs_dx_pow(double s) { return {Kind::AbsDxPow, s}; }
  static Symbol jx_pow(double s) { return {Kind::JxPow, s}; }

  Symbol(Kind k, double s_ = 0.0) : kind(k), s(s_) {}

  std::complex<double> value(double xi, double mu) const;

  bool odd_in_xi() const;
  bool odd_in_mu() const;

  std::string name() const;
};

}  // namespace kp5
