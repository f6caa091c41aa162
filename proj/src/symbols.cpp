#include "kp5/symbols.hpp"

#include <cmath>

namespace kp5 {

std::complex<double> Symbol::value(double xi, double mu) const {
  using C = std::complex<double>;
  const double inv = xi == 0.0 ? 0.0 : 1.0 / xi;
  switch (kind) {
    case Kind::Dx: return C(0.0, xi);
    case Kind::Dx2: return C(-xi * xi, 0.0);
    case Kind::Dx4: return C(xi * xi * xi * xi, 0.0);
    case Kind::Dx5: return C(0.0, xi * xi * xi * xi * xi);
    case Kind::DxInvDy: return C(mu * inv, 0.0);
    case Kind::DxInv2Dy2: return C(mu * mu * inv * inv, 0.0);
    case Kind::DxInvDy2: return C(0.0, mu * mu * inv);
    case Kind::Dy: return C(0.0, mu);
    case Kind::AbsDxPow: return C(xi == 0.0 && s > 0.0 ? 0.0 : std::pow(std::abs(xi), s), 0.0);
    case Kind::JxPow: return C(std::pow(1.0 + xi * xi, 0.5 * s), 0.0);
    case Kind::Dispersion: return C(0.0, xi == 0.0 ? 0.0 : xi * xi * xi * xi * xi + mu * mu * inv);
  }
  return C(0.0, 0.0);
}

bool Symbol::odd_in_xi() const {
  switch (kind) {
    case Kind::Dx:
    case Kind::Dx5:
    case Kind::DxInvDy:
    case Kind::DxInvDy2:
    case Kind::Dispersion: return true;
    default: return false;
  }
}

bool Symbol::odd_in_mu() const { return kind == Kind::Dy || kind == Kind::DxInvDy; }

std::string Symbol::name() const {
  switch (kind) {
    case Kind::Dx: return "Dx";
    case Kind::Dx2: return "Dx2";
    case Kind::Dx4: return "Dx4";
    case Kind::Dx5: return "Dx5";
    case Kind::DxInvDy: return "DxInvDy";
    case Kind::DxInv2Dy2: return "DxInv2Dy2";
    case Kind::DxInvDy2: return "DxInvDy2";
    case Kind::Dy: return "Dy";
    case Kind::AbsDxPow: return "AbsDxPow(" + std::to_string(s) + ")";
    case Kind::JxPow: return "JxPow(" + std::to_string(s) + ")";
    case Kind::Dispersion: return "Dispersion";
  }
  return "?";
}

}  // namespace kp5
