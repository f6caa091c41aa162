#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "kp5/field.hpp"
#include "kp5/spectral.hpp"

namespace kp5 {

struct PohozaevQuantities {
  double dxx_norm2 = 0.0;      // ||d_x^2 phi||^2
  double dxinvdy_norm2 = 0.0;  // ||d_x^{-1} d_y phi||^2
  double mass_term = 0.0;      // (p/4) integral phi^2
  double potential_term = 0.0; // p/(2(p+2)) integral phi^(p+2)

  std::array<double, 4> values() const { return {dxx_norm2, dxinvdy_norm2, mass_term, potential_term}; }
};

struct GroundState {
  Field phi;
  double c = 1.0;
  Power p{2};
  double residual = 0.0;  // L2 norm of the (zero x-mean part of the) equation defect
  double tol = 0.0;
  double d1 = 0.0;        // L_c(phi)
  double mass = 0.0;
  PohozaevQuantities pohozaev;
  int iterations = 0;
  std::vector<double> stabilizer_history;
};

/// x-odd anisotropic dipole d/dx exp(-x^2/sx^2 - y^2/sy^2). For odd integer
/// exponents an x-even part is added so that integral phi^(p+2) > 0.
Field preset_init(const Grid2D& g, const Power& p, std::uint64_t seed = 0);

/// cphi + d_x^4 phi + d_x^{-2} d_y^2 phi - phi^(p+1), without the xi = 0 line.
double equation_residual(const Spectrum& phi, double c, const Power& p);

/// Petviashvili iteration phi_hat <- S^gamma (c + xi^4 + mu^2/xi^2)^{-1} (phi^(p+1))_hat,
/// S = <L phi, phi> / <phi^(p+1), phi>, gamma = (p+1)/p. Nonlinear products are
/// alias-free on the modes |j| < nx/2, |k| < ny/2. The converged profile is
/// translated so that the centroid of phi^2 sits at the origin.
GroundState petviashvili_solve(const Power& p, double c, const Field& init, double tol, int max_iter);
GroundState petviashvili_solve(const Power& p, double c, const Grid2D& g, double tol, int max_iter);

/// Runs `starts` seeded initial guesses and returns the lowest-action profile.
GroundState multi_start(const Power& p, double c, const Grid2D& g, double tol, int max_iter, int starts = 3);

/// Geometric ladder of speeds from gs.c to c_target, each solve started from
/// the exact c-rescaling c^{1/p} phi(c^{1/4} x, c^{3/4} y) of the previous one.
GroundState continuation(const GroundState& gs, double c_target, int steps, double tol, int max_iter);

/// |a - b| / max(a, b) for the adjacent pairs of the four Pohozaev quantities.
std::array<double, 3> pohozaev_report(const GroundState& gs);

/// integral |u|^(p+2) over the sharp anisotropic bound; 1 at the extremizer.
double anisotropic_ratio_p(const Field& u, const Rational& p, double phi_mass);

double sharpness_check(const GroundState& gs);

/// Fills residual, d1, mass and the Pohozaev quantities from gs.phi.
void refresh_diagnostics(GroundState& gs);

}  // namespace kp5
