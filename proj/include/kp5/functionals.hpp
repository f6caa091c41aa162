#pragma once

#include <string>

#include "kp5/field.hpp"
#include "kp5/spectral.hpp"

namespace kp5 {

struct FunctionalReport {
  double mass = 0.0;
  double energy = 0.0;
  double L1 = 0.0;
  double I = 0.0;
  double K = 0.0;
  double Q = 0.0;
  double J = 0.0;
  double es_norm2 = 0.0;  // es_norm(u, 2)
  double dy_norm = 0.0;   // ||d_y u||
  double l4_norm4 = 0.0;  // integral u^4
  Rational p{2};
  double c = 1.0;

  // Building blocks of the values above.
  double dxx_norm2 = 0.0;     // ||d_x^2 u||^2
  double dxinvdy_norm2 = 0.0; // ||d_x^{-1} d_y u||^2
  double potential = 0.0;     // integral u^(p+2)

  /// mass + ||d_x^2 u||^2 + ||d_x^{-1} d_y u||^2
  double e2_proxy() const { return mass + dxx_norm2 + dxinvdy_norm2; }
};

double mass(const Field& u);
double mass(const Spectrum& s);

/// E(u) = 1/2 integral [(d_x^2 u)^2 + (d_x^{-1} d_y u)^2] - 1/(p+2) integral u^(p+2).
double energy(const Field& u, const Power& p);

/// integral y^2 u^2 with y the centered box coordinate.
double y_moment(const Field& u);

FunctionalReport functional_report(const Field& u, const Power& p, double c = 1.0);
FunctionalReport functional_report(const Spectrum& s, const Power& p, double c = 1.0);

/// ||(1 + |D_x|)^s u|| + ||d_x^{-1} d_y u||.
double es_norm(const Field& u, double s);

/// L2 norm of (1 + |xi|^(2s) + |n|/|xi|) u_hat over xi != 0. Cylinder grids only.
double zs_norm(const Field& u, double s);
double zs_norm(const Spectrum& s, double sp);

/// 1/2 integral [|D_x^s u|^2 + (d_x^{-1} d_y u)^2] - 1/(p+2) integral u^(p+2).
double cylinder_energy(const Field& u, double s, const Power& p);
double cylinder_energy(const Spectrum& u, double s, const Power& p);

struct SetLabel {
  enum class Kind { GroundStateBoundary, InJ, InQminus, InD, Subthreshold, None };

  Kind label = Kind::None;
  bool l1_below_d1 = false;
  bool i_negative = false;
  bool k_positive = false;
  bool q_negative = false;
  bool l1_negative = false;
  bool below_phi_mass = false;
  double margin = 0.0;
  FunctionalReport report;
};

std::string to_string(SetLabel::Kind kind);

/// Margins: the invariant-set tests use 1e-10 |d1|; the ground-state boundary
/// needs |L1 - d1| and |I| within 1e-6 of d1 and mass respectively.
SetLabel classify(const Field& u, const Power& p, double d1, double phi_mass);
SetLabel classify(const FunctionalReport& r, double d1, double phi_mass);

/// ||u||_4^4 / [(4/phi_mass) ||u||^2 ||d_xx u|| ||d_x^{-1} d_y u||].
double anisotropic_ratio(const Field& u, double phi_mass);

struct ScaleFamily {
  enum class Kind { Critical, YSqueeze, BlowupFamily, Instability };
  Kind kind;
  double param;  // lambda, or epsilon for Instability

  static ScaleFamily critical(double l) { return {Kind::Critical, l}; }
  static ScaleFamily ysqueeze(double l) { return {Kind::YSqueeze, l}; }
  static ScaleFamily blowup(double l) { return {Kind::BlowupFamily, l}; }
  static ScaleFamily instability(double e) { return {Kind::Instability, e}; }
};

struct ScaleCoefficients {
  double amplitude, a, b;  // u -> amplitude * u(a x, b y)
};

ScaleCoefficients scale_coefficients(const ScaleFamily& fam, const Rational& p);

/// amplitude * u(a x, b y) sampled from the spectral interpolant of u, taken as
/// zero outside the box. Throws LocalizationLost when more than 1e-6 of the
/// mass of u lies where the rescaled grid cannot see it.
Field rescale(const Field& u, const ScaleCoefficients& sc);

/// Rescaled field sampled from the spectral interpolant of u, taken as zero
/// outside the box. Throws LocalizationLost when more than 1e-6 of the mass of u
/// lies where the rescaled grid cannot see it.
Field scale_transform(const Field& u, const ScaleFamily& fam, const Rational& p = Rational(2));

/// f(lambda) = 1/2 (1 - lambda^4) - 2 (1 - lambda^(p+4)) / (p+4).
double ysqueeze_gap_factor(double lambda, const Rational& p);

/// Bound on the E^2 proxy along a flow with initial mass m0 and energy e0.
double e2_bound(double m0, double e0, double phi_mass);

std::string csv_header();
std::string csv_row(double t, const FunctionalReport& r);

}  // namespace kp5
