#include "kp5/evolution.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

#include "kp5/error.hpp"

namespace kp5 {

std::string to_string(Integrator i) { return i == Integrator::ETDRK4 ? "ETDRK4" : "IFRK4"; }

Integrator integrator_from_string(const std::string& text) {
  if (text == "ETDRK4" || text == "etdrk4") return Integrator::ETDRK4;
  if (text == "IFRK4" || text == "ifrk4") return Integrator::IFRK4;
  fail(ErrorCode::InvalidArgument, "unknown integrator '" + text + "'");
}

std::string to_string(BlowupReport::Trigger t) {
  switch (t) {
    case BlowupReport::Trigger::None: return "None";
    case BlowupReport::Trigger::DyGrowth: return "DyGrowth";
    case BlowupReport::Trigger::ResolutionLoss: return "ResolutionLoss";
    case BlowupReport::Trigger::Both: return "Both";
  }
  return "None";
}

void validate(const SolverConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) fail(ErrorCode::InvalidArgument, "dt must be positive");
  if (!(cfg.t_final > 0.0) || !std::isfinite(cfg.t_final))
    fail(ErrorCode::InvalidArgument, "t_final must be positive");
  if (cfg.dt > cfg.t_final * (1.0 + 1e-12)) fail(ErrorCode::InvalidArgument, "dt exceeds t_final");
  if (cfg.diag_stride < 1) fail(ErrorCode::InvalidArgument, "diag_stride must be at least 1");
  if (!(cfg.blowup_growth_factor > 1.0)) fail(ErrorCode::InvalidArgument, "blowup_growth_factor must exceed 1");
  if (!(cfg.tail_energy_frac > 0.0)) fail(ErrorCode::InvalidArgument, "tail_energy_frac must be positive");
  if (cfg.contour_points < 16) fail(ErrorCode::InvalidArgument, "contour_points must be at least 16");
  if (cfg.p.p.value() <= 0.0) fail(ErrorCode::InvalidArgument, "p must be positive");
}

Spectrum linear_propagator(const Spectrum& s, double t) {
  const Grid2D& g = s.grid();
  Eigen::ArrayXXcd out = s.coeffs();
  for (int k = 0; k < g.ny(); ++k) {
    const double mu = g.mu(k);
    for (int j = 1; j < g.spectral_nx(); ++j) {
      const double xi = g.xi(j);
      const double w = std::pow(xi, 5) + mu * mu / xi;
      out(j, k) *= std::polar(1.0, t * w);
    }
  }
  return Spectrum(g, std::move(out));
}

namespace {

using cd = std::complex<double>;

double dispersion(const Grid2D& g, int j, int k) {
  const double xi = g.xi(j);
  const double mu = g.mu(k);
  return std::pow(xi, 5) + mu * mu / xi;
}

bool retained(const Grid2D& g, int j, int k, int kx, int ky) {
  return j >= 1 && j <= kx && std::abs(g.signed_k(k)) <= ky;
}

}  // namespace

Evolver::Evolver(const Grid2D& g, const SolverConfig& cfg)
    : grid_(g), cfg_(cfg), kx_(retained_x(g, cfg.p.p)), ky_(retained_y(g, cfg.p.p)) {
  validate(cfg);
  const int nh = g.spectral_nx();
  const int ny = g.ny();
  mask_ = Eigen::ArrayXXd::Zero(nh, ny);
  dx_ = Eigen::ArrayXXcd::Zero(nh, ny);
  e_ = e2_ = q_ = f1_ = f2_ = f3_ = Eigen::ArrayXXcd::Zero(nh, ny);
  const double h = cfg.dt;
  const int m = cfg.contour_points;
  std::vector<cd> roots(m);
  for (int i = 0; i < m; ++i) roots[i] = std::polar(1.0, 2.0 * std::numbers::pi * (i + 0.5) / m);
  for (int k = 0; k < ny; ++k) {
    for (int j = 0; j < nh; ++j) {
      if (!retained(g, j, k, kx_, ky_)) continue;
      mask_(j, k) = 1.0;
      dx_(j, k) = cd(0.0, -g.xi(j));
      const cd z(0.0, h * dispersion(g, j, k));
      e_(j, k) = std::exp(z);
      e2_(j, k) = std::exp(0.5 * z);
      if (cfg.integrator != Integrator::ETDRK4) continue;
      cd q = 0.0, a = 0.0, b = 0.0, c = 0.0;
      for (const cd& r : roots) {
        const cd w = z + r;
        const cd ew = std::exp(w);
        const cd w3 = w * w * w;
        q += (std::exp(0.5 * w) - 1.0) / w;
        a += (-4.0 - w + ew * (4.0 - 3.0 * w + w * w)) / w3;
        b += (2.0 + w + ew * (-2.0 + w)) / w3;
        c += (-4.0 - 3.0 * w - w * w + ew * (4.0 - w)) / w3;
      }
      q_(j, k) = h * q / double(m);
      f1_(j, k) = h * a / double(m);
      f2_(j, k) = h * b / double(m);
      f3_(j, k) = h * c / double(m);
    }
  }
}

Spectrum Evolver::admissible(const Spectrum& u) const {
  if (!(u.grid() == grid_)) fail(ErrorCode::InvalidGrid, "state grid differs from the solver grid");
  return Spectrum(grid_, u.coeffs() * mask_.cast<cd>());
}

Eigen::ArrayXXcd Evolver::nonlinear_coeffs(const Eigen::ArrayXXcd& u) const {
  if (!cfg_.nonlinear) return Eigen::ArrayXXcd::Zero(u.rows(), u.cols());
  const Spectrum s(grid_, u);
  const Spectrum w = power_spectrum(s, cfg_.p.p + 1, cfg_.p.odd_root, kx_, ky_, kx_, ky_);
  return dx_ * w.coeffs();
}

Spectrum Evolver::nonlinear(const Spectrum& u) const {
  return Spectrum(grid_, nonlinear_coeffs(admissible(u).coeffs()));
}

Eigen::ArrayXXcd Evolver::step_coeffs(const Eigen::ArrayXXcd& v) const {
  const double h = cfg_.dt;
  const Eigen::ArrayXXcd nv = nonlinear_coeffs(v);
  Eigen::ArrayXXcd out;
  if (cfg_.integrator == Integrator::ETDRK4) {
    const Eigen::ArrayXXcd a = e2_ * v + q_ * nv;
    const Eigen::ArrayXXcd na = nonlinear_coeffs(a);
    const Eigen::ArrayXXcd b = e2_ * v + q_ * na;
    const Eigen::ArrayXXcd nb = nonlinear_coeffs(b);
    const Eigen::ArrayXXcd c = e2_ * a + q_ * (2.0 * nb - nv);
    const Eigen::ArrayXXcd nc = nonlinear_coeffs(c);
    out = e_ * v + f1_ * nv + 2.0 * f2_ * (na + nb) + f3_ * nc;
  } else {
    const Eigen::ArrayXXcd a = e2_ * (v + 0.5 * h * nv);
    const Eigen::ArrayXXcd na = nonlinear_coeffs(a);
    const Eigen::ArrayXXcd b = e2_ * v + 0.5 * h * na;
    const Eigen::ArrayXXcd nb = nonlinear_coeffs(b);
    const Eigen::ArrayXXcd c = e_ * v + h * e2_ * nb;
    const Eigen::ArrayXXcd nc = nonlinear_coeffs(c);
    out = e_ * v + (h / 6.0) * (e_ * nv + 2.0 * e2_ * (na + nb) + nc);
  }
  out *= mask_.cast<cd>();
  if (!out.isFinite().all()) fail(ErrorCode::NonFinite, "non-finite coefficients after a time step");
  return out;
}

Spectrum Evolver::step(const Spectrum& u) const {
  return Spectrum(grid_, step_coeffs(admissible(u).coeffs()));
}

Spectrum step(const Spectrum& state, const SolverConfig& cfg) { return Evolver(state.grid(), cfg).step(state); }

double tail_fraction(const Spectrum& s, const Rational& p) {
  const Grid2D& g = s.grid();
  const int kx = retained_x(g, p);
  const int ky = retained_y(g, p);
  const Eigen::ArrayXd w = half_weights(g);
  double total = 0.0, tail = 0.0;
  for (int k = 0; k < g.ny(); ++k) {
    const int sk = std::abs(g.signed_k(k));
    for (int j = 0; j < g.spectral_nx(); ++j) {
      const double e = w(j) * std::norm(s.coeffs()(j, k));
      total += e;
      if (8 * j > 7 * kx || 8 * sk > 7 * ky) tail += e;
    }
  }
  return total > 0.0 ? tail / total : 0.0;
}

double cfl_number(const Grid2D& g, const SolverConfig& cfg) {
  const int kx = retained_x(g, cfg.p.p);
  const int ky = retained_y(g, cfg.p.p);
  double m = 0.0;
  for (int k = 0; k < g.ny(); ++k)
    for (int j = 1; j <= kx; ++j)
      if (std::abs(g.signed_k(k)) <= ky) m = std::max(m, std::abs(dispersion(g, j, k)));
  return cfg.dt * m;
}

namespace {

double dy_norm(const Spectrum& s) {
  const Grid2D& g = s.grid();
  const Eigen::ArrayXd w = half_weights(g);
  double acc = 0.0;
  for (int k = 0; k < g.ny(); ++k) {
    if (g.signed_k(k) == -g.ny() / 2) continue;
    const double mu = g.mu(k);
    for (int j = 0; j < g.spectral_nx(); ++j) acc += w(j) * mu * mu * std::norm(s.coeffs()(j, k));
  }
  return std::sqrt(g.cell_area() * acc);
}

bool concave(const std::vector<double>& j) {
  if (j.size() < 3) return false;
  for (size_t i = 1; i + 1 < j.size(); ++i)
    if (!(j[i + 1] - 2.0 * j[i] + j[i - 1] < 0.0)) return false;
  return true;
}

// Later zero of the least-squares parabola through (t, J).
double extrapolate_zero(const std::vector<double>& t, const std::vector<double>& j) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (t.size() < 3) return nan;
  const double t0 = t.front();
  const double scale = std::max(t.back() - t0, 1e-300);
  Eigen::MatrixXd a(t.size(), 3);
  Eigen::VectorXd b(t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    const double s = (t[i] - t0) / scale;
    a(i, 0) = s * s;
    a(i, 1) = s;
    a(i, 2) = 1.0;
    b(i) = j[i];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  const double last = (t.back() - t0) / scale;
  double best = nan;
  auto consider = [&](double s) {
    if (std::isfinite(s) && s > last && !(s >= best)) best = s;
  };
  if (std::abs(c(0)) < 1e-300) {
    if (c(1) != 0.0) consider(-c(2) / c(1));
  } else {
    const double disc = c(1) * c(1) - 4.0 * c(0) * c(2);
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double qq = -0.5 * (c(1) + std::copysign(sq, c(1)));
      consider(qq / c(0));
      if (qq != 0.0) consider(c(2) / qq);
    }
  }
  return std::isfinite(best) ? t0 + best * scale : nan;
}

}  // namespace

EvolveResult evolve(const Field& u0, const SolverConfig& cfg, const EvolveOptions& opts) {
  validate(cfg);
  const Grid2D& g = u0.grid();
  if (opts.snapshot_every < 0) fail(ErrorCode::InvalidArgument, "snapshot_every must be non-negative");
  if (opts.d1.has_value() != opts.phi_mass.has_value())
    fail(ErrorCode::InvalidArgument, "classification needs both d1 and phi_mass");
  const Evolver ev(g, cfg);
  EvolveResult res;
  res.cfl = cfl_number(g, cfg);

  Spectrum s = ev.admissible(forward(u0));
  const long nsteps = std::max(1L, std::lround(std::ceil(cfg.t_final / cfg.dt - 1e-9)));
  const double dy0 = dy_norm(s);

  auto record = [&](long n, const Spectrum& state) {
    const double t = n * cfg.dt;
    DiagnosticsSeries& d = res.diagnostics;
    d.times.push_back(t);
    d.reports.push_back(functional_report(state, cfg.p, cfg.c));
    d.dy_norms.push_back(dy_norm(state));
    d.tail_fracs.push_back(tail_fraction(state, cfg.p.p));
    if (opts.d1) d.labels.push_back(classify(d.reports.back(), *opts.d1, *opts.phi_mass));
  };
  auto store = [&](long n, const Spectrum& state) {
    const double t = n * cfg.dt;
    res.trajectory.times.push_back(t);
    res.trajectory.states.push_back(inverse(state));
    if (opts.on_snapshot) opts.on_snapshot(t, state);
  };

  record(0, s);
  store(0, s);
  long n = 0;
  bool stored_last = true;
  while (n < nsteps) {
    std::optional<Spectrum> next;
    try {
      next = ev.step(s);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonFinite) throw;
      res.blowup.detected = true;
      res.blowup.non_finite = true;
      res.blowup.trigger = BlowupReport::Trigger::ResolutionLoss;
      res.blowup.t_detect = (n + 1) * cfg.dt;
      break;
    }
    s = std::move(*next);
    ++n;
    const bool dy_hit = dy0 > 0.0 && dy_norm(s) >= cfg.blowup_growth_factor * dy0;
    const bool tail_hit = tail_fraction(s, cfg.p.p) >= cfg.tail_energy_frac;
    if (dy_hit || tail_hit) {
      res.blowup.detected = true;
      res.blowup.t_detect = n * cfg.dt;
      res.blowup.trigger = dy_hit && tail_hit ? BlowupReport::Trigger::Both
                           : dy_hit           ? BlowupReport::Trigger::DyGrowth
                                              : BlowupReport::Trigger::ResolutionLoss;
      store(n, s);
      stored_last = true;
      break;
    }
    if (n % cfg.diag_stride == 0) record(n, s);
    stored_last = false;
    if (opts.snapshot_every > 0 && n % opts.snapshot_every == 0) {
      store(n, s);
      stored_last = true;
    }
  }
  if (!stored_last && !res.blowup.detected) store(n, s);
  res.steps = static_cast<int>(n);

  const auto& reps = res.diagnostics.reports;
  const double m0 = reps.front().mass;
  const double e0 = reps.front().energy;
  std::vector<double> js;
  for (const auto& r : reps) {
    res.mass_drift = std::max(res.mass_drift, m0 > 0.0 ? std::abs(r.mass - m0) / m0 : std::abs(r.mass));
    res.energy_drift =
        std::max(res.energy_drift, e0 != 0.0 ? std::abs(r.energy - e0) / std::abs(e0) : std::abs(r.energy));
    js.push_back(r.J);
  }
  res.blowup.J_concavity_confirmed = concave(js);
  res.blowup.estimated_T0 = extrapolate_zero(res.diagnostics.times, js);
  return res;
}

std::vector<double> virial_residual(const DiagnosticsSeries& series) {
  const auto& t = series.times;
  if (t.size() < 3 || series.reports.size() != t.size())
    fail(ErrorCode::NonUniformSampling, "virial residual needs at least three diagnostic samples");
  const double h = t[1] - t[0];
  if (!(h > 0.0)) fail(ErrorCode::NonUniformSampling, "sample times must increase");
  for (size_t i = 1; i < t.size(); ++i)
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * h)
      fail(ErrorCode::NonUniformSampling, "diagnostic samples are not uniformly spaced");
  std::vector<double> r;
  for (size_t i = 1; i + 1 < t.size(); ++i) {
    const double jpp = (series.reports[i + 1].J - 2.0 * series.reports[i].J + series.reports[i - 1].J) / (h * h);
    r.push_back(jpp / 8.0 - series.reports[i].Q);
  }
  return r;
}

double virial_relative_residual(const DiagnosticsSeries& series) {
  const std::vector<double> r = virial_residual(series);
  double rmax = 0.0, qmax = 0.0;
  for (size_t i = 0; i < r.size(); ++i) {
    rmax = std::max(rmax, std::abs(r[i]));
    qmax = std::max(qmax, std::abs(series.reports[i + 1].Q));
  }
  return rmax / std::max(qmax, 1e-12);
}

}  // namespace kp5
