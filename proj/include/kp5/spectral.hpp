#pragma once

#include "kp5/field.hpp"
#include "kp5/rational.hpp"
#include "kp5/symbols.hpp"

namespace kp5 {

/// Exponent of a real power u^q together with the rule for sign-changing u.
/// With `odd_root` set, fractional q = a/n (n odd) means |u|^q, times sign(u)
/// when a is odd. Without it fractional powers need u >= 0.
struct Power {
  Rational p;
  bool odd_root = false;

  Power(Rational p_ = Rational(2), bool odd_root_ = false) : p(p_), odd_root(odd_root_) {}
  Power(int p_) : p(p_) {}
};

double real_power(double u, const Rational& q, bool odd_root);

/// Unitary transform: c = FFT(u) / sqrt(nx ny). With this scaling
/// integral u^2 = cell_area * sum |c|^2 over the full spectrum.
Spectrum forward(const Field& f);

/// Inverse of `forward`. Throws InvalidSpectrum when the stored half spectrum
/// is not the transform of a real field (relative defect above 1e-10).
Field inverse(const Spectrum& s);

Spectrum apply_symbol(const Spectrum& s, const Symbol& sym);

/// Multiplier values on the half-spectrum lattice, zeroed on the Nyquist
/// line in each direction where the symbol is odd.
Eigen::ArrayXXcd symbol_table(const Grid2D& g, const Symbol& sym);

int retained_x(const Grid2D& g, const Rational& p);
int retained_y(const Grid2D& g, const Rational& p);

/// Keeps |j| <= floor(nx/(p+2)) and |k| <= floor(ny/(p+2)).
Spectrum dealias(const Spectrum& s, const Rational& p);

Spectrum project_zero_x_mean(const Spectrum& s);

/// Weight 2 for 0 < j < nx/2 in the half spectrum, 1 on j = 0 and j = nx/2.
Eigen::ArrayXd half_weights(const Grid2D& g);

/// integral a b over the box, from coefficients.
double inner(const Spectrum& a, const Spectrum& b);
double norm2(const Spectrum& s);

/// Largest |j| and |k| carrying a coefficient above rel_tol * max|c|.
int band_limit_x(const Spectrum& s, double rel_tol = 1e-13);
int band_limit_y(const Spectrum& s, double rel_tol = 1e-13);

/// Smallest 2^a 3^b 5^c strictly greater than n.
int smooth_size_above(int n);

/// Spectrum of u^q on the original grid restricted to |j| <= kx_out,
/// |k| <= ky_out. The power is taken on a padded grid large enough that the
/// kept modes carry no aliasing when q is an integer.
Spectrum power_spectrum(const Spectrum& s, const Rational& q, bool odd_root, int kx_out, int ky_out);

/// Same with the input band |j| <= bx, |k| <= by given instead of scanned.
Spectrum power_spectrum(const Spectrum& s, const Rational& q, bool odd_root, int bx, int by, int kx_out,
                        int ky_out);

/// integral u^q over the box, evaluated on a padded grid.
double power_integral(const Spectrum& s, const Rational& q, bool odd_root);

/// integral |u|^q over the box, evaluated on a padded grid.
double abs_power_integral(const Spectrum& s, const Rational& q);

/// Trigonometric interpolant of s on another grid with the same box: modes are
/// embedded or truncated. Nyquist modes are split or folded symmetrically.
Spectrum resample(const Spectrum& s, const Grid2D& target);

/// Samples of the trigonometric interpolant at (a x_i + sx, b y_k + sy), with
/// coordinates taken periodically.
Eigen::ArrayXXd evaluate_scaled(const Spectrum& s, double a, double b, double sx = 0.0, double sy = 0.0);

}  // namespace kp5
