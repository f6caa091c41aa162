#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kp5/field.hpp"
#include "kp5/functionals.hpp"
#include "kp5/spectral.hpp"

namespace kp5 {

enum class Integrator { ETDRK4, IFRK4 };

std::string to_string(Integrator i);
Integrator integrator_from_string(const std::string& text);

struct SolverConfig {
  double dt = 1e-4;
  double t_final = 1.0;
  Power p{2};
  Integrator integrator = Integrator::ETDRK4;
  int diag_stride = 10;
  double blowup_growth_factor = 50.0;
  double tail_energy_frac = 1e-3;
  int contour_points = 32;
  bool nonlinear = true;  // false evolves the linear flow only
  double c = 1.0;         // speed used for L_c in the diagnostics
};

void validate(const SolverConfig& cfg);

/// Coefficientwise multiplication by exp(i t (xi^5 + mu^2/xi)).
Spectrum linear_propagator(const Spectrum& s, double t);

/// One-step integrator for u_hat_t = i(xi^5 + mu^2/xi) u_hat - i xi (u^(p+1))_hat with
/// the nonlinear term dealiased. Coefficient tables are built once per grid.
class Evolver {
 public:
  Evolver(const Grid2D& g, const SolverConfig& cfg);

  Spectrum step(const Spectrum& u) const;
  Spectrum nonlinear(const Spectrum& u) const;

  /// Dealiased, zero x-mean part of a state.
  Spectrum admissible(const Spectrum& u) const;

  const Grid2D& grid() const { return grid_; }
  const SolverConfig& config() const { return cfg_; }

 private:
  Eigen::ArrayXXcd step_coeffs(const Eigen::ArrayXXcd& u) const;
  Eigen::ArrayXXcd nonlinear_coeffs(const Eigen::ArrayXXcd& u) const;

  Grid2D grid_;
  SolverConfig cfg_;
  int kx_, ky_;
  Eigen::ArrayXXd mask_;
  Eigen::ArrayXXcd dx_;  // -i xi on the retained band
  Eigen::ArrayXXcd e_, e2_;
  Eigen::ArrayXXcd q_, f1_, f2_, f3_;
};

Spectrum step(const Spectrum& state, const SolverConfig& cfg);

/// Fraction of the L2 mass carried by modes with |j| > 7/8 Kx or |k| > 7/8 Ky,
/// K the retained band for exponent p.
double tail_fraction(const Spectrum& s, const Rational& p);

struct DiagnosticsSeries {
  std::vector<double> times;
  std::vector<FunctionalReport> reports;
  std::vector<double> dy_norms;
  std::vector<double> tail_fracs;
  std::vector<SetLabel> labels;  // filled when a ground-state level is supplied
};

struct BlowupReport {
  enum class Trigger { None, DyGrowth, ResolutionLoss, Both };

  bool detected = false;
  double t_detect = 0.0;
  Trigger trigger = Trigger::None;
  bool J_concavity_confirmed = false;
  double estimated_T0 = 0.0;  // NaN when the fitted parabola has no later root
  bool non_finite = false;
};

std::string to_string(BlowupReport::Trigger t);

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> states;
};

struct EvolveOptions {
  int snapshot_every = 0;  // steps between stored states; 0 stores the endpoints only
  std::optional<double> d1;        // with phi_mass, classify every diagnostic sample
  std::optional<double> phi_mass;
  std::function<void(double, const Spectrum&)> on_snapshot;
};

struct EvolveResult {
  Trajectory trajectory;
  DiagnosticsSeries diagnostics;
  BlowupReport blowup;
  double mass_drift = 0.0;    // max relative deviation from t = 0
  double energy_drift = 0.0;
  double cfl = 0.0;           // dt * max |symbol| on the retained band
  int steps = 0;
};

/// Largest dt |i(xi^5 + mu^2/xi)| over the retained band.
double cfl_number(const Grid2D& g, const SolverConfig& cfg);

EvolveResult evolve(const Field& u0, const SolverConfig& cfg, const EvolveOptions& opts = {});

/// (1/8) J'' - Q at interior samples, J'' by central second differences.
std::vector<double> virial_residual(const DiagnosticsSeries& series);

/// max |r| / max(max |Q|, 1e-12) over the interior samples.
double virial_relative_residual(const DiagnosticsSeries& series);

}  // namespace kp5
