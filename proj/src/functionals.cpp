#include "kp5/functionals.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "kp5/error.hpp"

namespace kp5 {

namespace {

double weighted_norm2(const Spectrum& s, const Eigen::ArrayXXd& w2) {
  const Grid2D& g = s.grid();
  return g.cell_area() * ((s.coeffs().abs2() * w2).colwise() * half_weights(g)).sum();
}

Eigen::ArrayXXd symbol_abs2(const Grid2D& g, const Symbol& sym) { return symbol_table(g, sym).abs2(); }

}  // namespace

double mass(const Field& u) { return norm2(forward(u)); }
double mass(const Spectrum& s) { return norm2(s); }

double energy(const Field& u, const Power& p) { return functional_report(u, p, 0.0).energy; }

double y_moment(const Field& u) {
  const Grid2D& g = u.grid();
  Eigen::ArrayXd y2(g.ny());
  for (int k = 0; k < g.ny(); ++k) y2(k) = g.y(k) * g.y(k);
  return g.cell_area() * (u.values().square().rowwise() * y2.transpose()).sum();
}

FunctionalReport functional_report(const Field& u, const Power& p, double c) {
  return functional_report(forward(u), p, c);
}

FunctionalReport functional_report(const Spectrum& s, const Power& pw, double c) {
  const Grid2D& g = s.grid();
  const Rational& p = pw.p;
  const double pv = p.value();
  FunctionalReport r;
  r.p = p;
  r.c = c;
  r.mass = norm2(s);
  r.dxx_norm2 = weighted_norm2(s, symbol_abs2(g, Symbol::Kind::Dx2));
  r.dxinvdy_norm2 = weighted_norm2(s, symbol_abs2(g, Symbol::Kind::DxInvDy));
  r.potential = power_integral(s, p + 2, pw.odd_root);
  r.l4_norm4 = (p == Rational(2)) ? r.potential : power_integral(s, Rational(4), false);
  r.energy = 0.5 * (r.dxx_norm2 + r.dxinvdy_norm2) - r.potential / (pv + 2.0);
  r.L1 = r.energy + 0.5 * c * r.mass;
  r.I = r.mass + r.dxx_norm2 + r.dxinvdy_norm2 - r.potential;
  r.K = r.mass + r.dxx_norm2 - (pv + 4.0) / (2.0 * (pv + 2.0)) * r.potential;
  r.Q = r.dxinvdy_norm2 - pv / (2.0 * (pv + 2.0)) * r.potential;
  r.dy_norm = std::sqrt(weighted_norm2(s, symbol_abs2(g, Symbol::Kind::Dy)));
  const double dxs = std::sqrt(weighted_norm2(s, (1.0 + symbol_abs2(g, Symbol::Kind::Dx).sqrt()).square().square()));
  r.es_norm2 = dxs + std::sqrt(r.dxinvdy_norm2);
  r.J = y_moment(inverse(s));
  return r;
}

double es_norm(const Field& u, double s) {
  const Spectrum sp = forward(u);
  const Grid2D& g = u.grid();
  const Eigen::ArrayXXd w = (1.0 + symbol_abs2(g, Symbol::Kind::Dx).sqrt()).pow(2.0 * s);
  return std::sqrt(weighted_norm2(sp, w)) + std::sqrt(weighted_norm2(sp, symbol_abs2(g, Symbol::Kind::DxInvDy)));
}

double zs_norm(const Spectrum& sp, double s) {
  const Grid2D& g = sp.grid();
  if (g.mode() != GridMode::Cylinder) fail(ErrorCode::WrongMode, "Z^s norm is defined on cylinder grids");
  Eigen::ArrayXXd w = Eigen::ArrayXXd::Zero(g.spectral_nx(), g.ny());
  for (int k = 0; k < g.ny(); ++k)
    for (int j = 1; j < g.spectral_nx(); ++j) {
      const double xi = g.xi(j);
      const double v = 1.0 + std::pow(xi, 2.0 * s) + std::abs(g.mu(k)) / xi;
      w(j, k) = v * v;
    }
  return std::sqrt(weighted_norm2(sp, w));
}

double zs_norm(const Field& u, double s) {
  if (u.grid().mode() != GridMode::Cylinder) fail(ErrorCode::WrongMode, "Z^s norm is defined on cylinder grids");
  return zs_norm(forward(u), s);
}

double cylinder_energy(const Spectrum& u, double s, const Power& p) {
  const Grid2D& g = u.grid();
  const double kin = weighted_norm2(u, symbol_abs2(g, Symbol::abs_dx_pow(s)));
  const double tr = weighted_norm2(u, symbol_abs2(g, Symbol::Kind::DxInvDy));
  return 0.5 * (kin + tr) - power_integral(u, p.p + 2, p.odd_root) / (p.p.value() + 2.0);
}

double cylinder_energy(const Field& u, double s, const Power& p) { return cylinder_energy(forward(u), s, p); }

std::string to_string(SetLabel::Kind kind) {
  switch (kind) {
    case SetLabel::Kind::GroundStateBoundary: return "GroundStateBoundary";
    case SetLabel::Kind::InJ: return "InJ";
    case SetLabel::Kind::InQminus: return "InQminus";
    case SetLabel::Kind::InD: return "InD";
    case SetLabel::Kind::Subthreshold: return "Subthreshold";
    case SetLabel::Kind::None: return "None";
  }
  return "?";
}

SetLabel classify(const FunctionalReport& r, double d1, double phi_mass) {
  if (!(d1 > 0.0) || !(phi_mass > 0.0)) fail(ErrorCode::InvalidArgument, "classification needs d1 > 0 and phi mass > 0");
  SetLabel s;
  s.report = r;
  s.margin = 1e-10 * std::abs(d1);
  const double m = s.margin;
  s.l1_below_d1 = r.L1 < d1 - m;
  s.i_negative = r.I < -m;
  s.k_positive = r.K > m;
  s.q_negative = r.Q < -m;
  s.l1_negative = r.L1 < -m;
  s.below_phi_mass = r.mass < phi_mass;
  if (r.mass == 0.0) {
    s.label = SetLabel::Kind::None;
  } else if (std::abs(r.L1 - d1) <= 1e-6 * d1 && std::abs(r.I) <= 1e-6 * r.mass) {
    s.label = SetLabel::Kind::GroundStateBoundary;
  } else if (s.l1_below_d1 && s.i_negative && s.k_positive) {
    s.label = SetLabel::Kind::InJ;
  } else if (s.i_negative && std::abs(r.K) <= m) {
    s.label = SetLabel::Kind::InD;
  } else if (s.l1_negative && s.q_negative) {
    s.label = SetLabel::Kind::InQminus;
  } else if (s.below_phi_mass) {
    s.label = SetLabel::Kind::Subthreshold;
  }
  return s;
}

SetLabel classify(const Field& u, const Power& p, double d1, double phi_mass) {
  return classify(functional_report(u, p, 1.0), d1, phi_mass);
}

double anisotropic_ratio(const Field& u, double phi_mass) {
  const FunctionalReport r = functional_report(u, Power(2), 1.0);
  const double tiny = 1e-14;
  if (r.mass < tiny || r.dxx_norm2 < tiny * tiny || r.dxinvdy_norm2 < tiny * tiny)
    fail(ErrorCode::DegenerateField, "anisotropic ratio needs nonzero norms");
  return r.l4_norm4 / ((4.0 / phi_mass) * r.mass * std::sqrt(r.dxx_norm2) * std::sqrt(r.dxinvdy_norm2));
}

ScaleCoefficients scale_coefficients(const ScaleFamily& fam, const Rational& p) {
  const double l = fam.param;
  switch (fam.kind) {
    case ScaleFamily::Kind::Critical: return {std::pow(l, 4.0 / p.value()), l, l * l * l};
    case ScaleFamily::Kind::YSqueeze: return {l, 1.0, 1.0 / (l * l)};
    case ScaleFamily::Kind::BlowupFamily: return {l * l, l, l * l * l};
    case ScaleFamily::Kind::Instability:
      return {std::sqrt(1.0 + l), std::pow(1.0 + 4.0 * l, 0.25), std::sqrt(1.0 + 4.0 * l) * (1.0 - 6.0 * l)};
  }
  return {1.0, 1.0, 1.0};
}

Field scale_transform(const Field& u, const ScaleFamily& fam, const Rational& p) {
  if (fam.kind == ScaleFamily::Kind::Instability) {
    if (!(fam.param >= 0.0 && fam.param < 1.0 / 6.0))
      fail(ErrorCode::InvalidArgument, "instability parameter must lie in [0, 1/6)");
  } else if (!(fam.param > 0.0)) {
    fail(ErrorCode::InvalidArgument, "scaling parameter must be positive");
  }
  return rescale(u, scale_coefficients(fam, p));
}

Field rescale(const Field& u, const ScaleCoefficients& sc) {
  const Grid2D& g = u.grid();
  if (!(sc.a > 0.0) || !(sc.b > 0.0)) fail(ErrorCode::InvalidArgument, "rescaling factors must be positive");

  const double hx = std::min(sc.a, 1.0) * 0.5 * g.lx();
  const double hy = std::min(sc.b, 1.0) * 0.5 * g.ly();
  double outside = 0.0;
  const double total = u.values().square().sum();
  for (int k = 0; k < g.ny(); ++k)
    for (int i = 0; i < g.nx(); ++i)
      if (std::abs(g.x(i)) > hx || std::abs(g.y(k)) > hy) outside += u(i, k) * u(i, k);
  if (total > 0.0 && outside > 1e-6 * total)
    fail(ErrorCode::LocalizationLost, "rescaling drops " + std::to_string(outside / total) + " of the mass");

  Eigen::ArrayXXd v = sc.amplitude * evaluate_scaled(forward(u), sc.a, sc.b);
  for (int k = 0; k < g.ny(); ++k)
    for (int i = 0; i < g.nx(); ++i)
      if (std::abs(sc.a * g.x(i)) > 0.5 * g.lx() || std::abs(sc.b * g.y(k)) > 0.5 * g.ly()) v(i, k) = 0.0;
  return inverse(project_zero_x_mean(forward(Field(g, std::move(v)))));
}

double ysqueeze_gap_factor(double lambda, const Rational& p) {
  const double pv = p.value();
  return 0.5 * (1.0 - std::pow(lambda, 4.0)) - 2.0 * (1.0 - std::pow(lambda, pv + 4.0)) / (pv + 4.0);
}

double e2_bound(double m0, double e0, double phi_mass) {
  const double den = 1.0 - m0 / phi_mass;
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return m0 + 2.0 * e0 / den;
}

std::string csv_header() { return "t,mass,energy,L1,I,K,Q,J,es_norm2,dy_norm,l4_norm4"; }

std::string csv_row(double t, const FunctionalReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", t, r.mass,
                r.energy, r.L1, r.I, r.K, r.Q, r.J, r.es_norm2, r.dy_norm, r.l4_norm4);
  return buf;
}

}  // namespace kp5
