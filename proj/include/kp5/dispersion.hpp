#pragma once

#include <complex>
#include <string>
#include <vector>

namespace kp5 {

struct DecaySample {
  std::vector<double> params;  // positive scale parameters, e.g. (t, N)
  double value = 0.0;          // measured sup magnitude
};

/// Log-log least squares log v = c + sum_k s_k log p_k over the parameters
/// that vary, and the smallest C with v <= C prod_k p_k^(e_k) for the target
/// exponents e.
struct DecayFit {
  std::vector<std::string> names;
  std::vector<DecaySample> samples;
  std::vector<double> slopes;        // NaN for parameters held fixed
  std::vector<double> slope_errors;  // standard errors of the slopes
  double intercept = 0.0;
  std::vector<double> bound_exponents;
  double bound_constant = 0.0;
  int violations = 0;
};

/// Needs at least five samples per varied parameter (InsufficientSamples).
DecayFit fit_exponents(const std::vector<DecaySample>& samples, const std::vector<double>& bound_exponents,
                       const std::vector<std::string>& names = {});

/// Relative slack allowed when counting violations of C * bound.
inline constexpr double kBoundSlack = 1e-12;

struct OscillatorySup {
  double value = 0.0;
  double x = 0.0;                // maximizing x
  double refinement_change = 0.0; // relative change of the value at x when the node density doubles
  long nodes = 0;
};

/// sup over x in [x_lo, x_hi] of |int exp(i(t xi^5 + x xi)) psi1(xi/N) d xi|: the
/// x-map comes from one FFT of a trapezoid rule, the best local maxima are
/// refined by golden-section search, and the winning value is recomputed at
/// twice the node density (QuadratureUnresolved above 1e-8 relative change).
OscillatorySup phase1d_sup(double N, double t, double x_lo, double x_hi);

/// Same with the default search range |x| <= 5 |t| N^4.
OscillatorySup phase1d_sup(double N, double t);

/// sup over (x, y) of |G(x, y, t)| for
/// G = int int exp(i(x xi + y mu) + i t (xi^5 + mu^2/xi)) psi1(xi/N) d xi d mu.
/// The mu integral is done in closed form:
/// sqrt(pi |xi| / |t|) exp(i pi/4 sgn(t xi)) exp(-i y^2 xi / (4t)),
/// so y only shifts x and the sup reduces to a 1D search.
OscillatorySup kernel2d_sup(double N, double t);

/// G(x, y, t) from the reduced 1D integral, for comparison with brute force.
double kernel2d_abs(double N, double t, double x, double y);

/// Cylinder kernel
/// K(x, y, t) = sum_n int psi1(xi/2^j)^2 psi0(n/2^(3j))^2 exp(i(xi x + n y + t(xi^5 + n^2/xi))) d xi.
/// Evaluated at one point with trapezoid nodes and a direct n sum.
double cylinder_kernel_value(int j, double x, double y, double t);

struct CylinderSup {
  int j = 0;
  int l = 0;
  double value = 0.0;
  double x = 0.0, y = 0.0, t = 0.0;
  double refinement_change = 0.0;
};

/// sup of |K| over x (FFT grid), y in {0, pi/4, ..., pi} and t_samples values of
/// t spread over [2^-l, 2^(1-l)]. LatticeTooLarge for j > 5; needs 2j <= l <= 2j + 10.
CylinderSup cylinder_sup(int j, int l, int t_samples);

/// sup of |K| over x and the five y values at a single t > 0 (LatticeTooLarge for j > 5).
CylinderSup cylinder_sup_at(int j, double t);

/// Measured sups for l in [l_min, l_max] fitted against 2^l 2^(-29j/10) 2^((2j-l)/10),
/// with parameters (2^l, 2^j).
DecayFit cylinder_kernel(int j, int l_min, int l_max, int t_samples);

/// Target exponents of (2^l, 2^j) in the cylinder bound.
std::vector<double> cylinder_bound_exponents();

/// Lattice sum A(a, y) = sum_n psi0(n/2^(3j))^2 exp(i(n y + n^2 a)).
std::complex<double> lattice_sum(int j, double a, double y);

/// Poisson images sum over nu_min <= |nu| <= nu_max (nu = 0 counted once) of
/// int psi0(eta/2^(3j))^2 exp(i(eta (y + 2 pi nu) + a eta^2)) d eta.
/// With nu_min = 0 and enough images this reproduces lattice_sum.
std::complex<double> poisson_images(int j, double a, double y, int nu_min, int nu_max);

/// Largest |poisson_images(j, a, y, 100, nu_max)| over y in {0, pi/4, ..., pi} and
/// a = t/xi for t in [2^-(2j+6), 2^(1-2j)], xi in [2^(j-2), 2^(j+2)].
double poisson_tail_max(int j, int nu_max = 400);

/// int psi1(r)^power dr over the real line.
double psi1_integral(int power = 1);

/// sum_n psi0(n/2^(3j))^2.
double psi0_squared_lattice_sum(int j);

/// Sample builders. phase1d and kernel2d use t = tau/N^5 for every N and tau,
/// with parameters (t, N); the cylinder uses (2^l, 2^j), one sample per t.
std::vector<DecaySample> phase1d_samples(const std::vector<double>& N, const std::vector<double>& tau);
std::vector<DecaySample> kernel2d_samples(const std::vector<double>& N, const std::vector<double>& tau);
std::vector<DecaySample> cylinder_samples(int j, int l_min, int l_max, int t_samples);

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, int n);

}  // namespace kp5
