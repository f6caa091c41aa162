#include "kp5/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "kp5/error.hpp"
#include "kp5/fft.hpp"

namespace kp5 {

double real_power(double u, const Rational& q, bool odd_root) {
  if (q.is_integer() && q.num >= 0) {
    double r = 1.0;
    for (std::int64_t i = 0; i < q.num; ++i) r *= u;
    return r;
  }
  if (u >= 0.0) return std::pow(u, q.value());
  if (odd_root && q.has_odd_denominator()) {
    const double m = std::pow(-u, q.value());
    return (q.num % 2 != 0) ? -m : m;
  }
  fail(ErrorCode::NonIntegerPowerOnSignChangingField,
       "u^" + q.str() + " of a sign-changing field needs the odd_root convention");
}

namespace {

// Multiplies a half spectrum of an (mx, my) grid by (-1)^(j+k), which moves the
// phase origin from the first sample to the box center.
void center_phase(Eigen::ArrayXXcd& c, int my) {
  for (int k = 0; k < c.cols(); ++k) {
    const int sk = k <= my / 2 ? k : k - my;
    for (int j = 0; j < c.rows(); ++j)
      if ((j + sk) % 2 != 0) c(j, k) = -c(j, k);
  }
}

}  // namespace

Spectrum forward(const Field& f) {
  const Grid2D& g = f.grid();
  const double scale = 1.0 / std::sqrt(static_cast<double>(g.nx()) * g.ny());
  Eigen::ArrayXXcd c = fft::r2c(f.values()) * scale;
  center_phase(c, g.ny());
  return Spectrum(g, std::move(c));
}

Field inverse(const Spectrum& s) {
  const double defect = s.hermitian_defect();
  if (defect > 1e-10) fail(ErrorCode::InvalidSpectrum, "Hermitian symmetry violated by " + std::to_string(defect));
  const Grid2D& g = s.grid();
  const double scale = 1.0 / std::sqrt(static_cast<double>(g.nx()) * g.ny());
  Eigen::ArrayXXcd c = s.coeffs();
  center_phase(c, g.ny());
  return Field(g, fft::c2r(c, g.nx()) * scale);
}

Eigen::ArrayXXcd symbol_table(const Grid2D& g, const Symbol& sym) {
  const int nh = g.spectral_nx();
  Eigen::ArrayXXcd m(nh, g.ny());
  for (int k = 0; k < g.ny(); ++k) {
    const bool ny_line = g.signed_k(k) == -g.ny() / 2;
    for (int j = 0; j < nh; ++j) {
      const bool nx_line = j == g.nx() / 2;
      if ((nx_line && sym.odd_in_xi()) || (ny_line && sym.odd_in_mu()))
        m(j, k) = 0.0;
      else
        m(j, k) = sym.value(g.xi(j), g.mu(k));
    }
  }
  return m;
}

Spectrum apply_symbol(const Spectrum& s, const Symbol& sym) {
  return Spectrum(s.grid(), s.coeffs() * symbol_table(s.grid(), sym));
}

int retained_x(const Grid2D& g, const Rational& p) {
  return static_cast<int>((g.nx() * p.den) / (p.num + 2 * p.den));
}

int retained_y(const Grid2D& g, const Rational& p) {
  return static_cast<int>((g.ny() * p.den) / (p.num + 2 * p.den));
}

Spectrum dealias(const Spectrum& s, const Rational& p) {
  const Grid2D& g = s.grid();
  const int kx = retained_x(g, p);
  const int ky = retained_y(g, p);
  Eigen::ArrayXXcd c = s.coeffs();
  for (int k = 0; k < g.ny(); ++k) {
    const bool drop_col = std::abs(g.signed_k(k)) > ky;
    for (int j = 0; j < g.spectral_nx(); ++j)
      if (drop_col || j > kx) c(j, k) = 0.0;
  }
  return Spectrum(g, std::move(c));
}

Spectrum project_zero_x_mean(const Spectrum& s) {
  Eigen::ArrayXXcd c = s.coeffs();
  c.row(0).setZero();
  return Spectrum(s.grid(), std::move(c));
}

Eigen::ArrayXd half_weights(const Grid2D& g) {
  Eigen::ArrayXd w = Eigen::ArrayXd::Constant(g.spectral_nx(), 2.0);
  w(0) = 1.0;
  w(g.nx() / 2) = 1.0;
  return w;
}

double inner(const Spectrum& a, const Spectrum& b) {
  const Eigen::ArrayXXd prod = (a.coeffs() * b.coeffs().conjugate()).real();
  return a.grid().cell_area() * (prod.colwise() * half_weights(a.grid())).sum();
}

double norm2(const Spectrum& s) {
  return s.grid().cell_area() * (s.coeffs().abs2().colwise() * half_weights(s.grid())).sum();
}

int band_limit_x(const Spectrum& s, double rel_tol) {
  const Eigen::ArrayXXd a = s.coeffs().abs();
  const double thr = rel_tol * a.maxCoeff();
  for (int j = static_cast<int>(a.rows()) - 1; j > 0; --j)
    if ((a.row(j) > thr).any()) return j;
  return 0;
}

int band_limit_y(const Spectrum& s, double rel_tol) {
  const Eigen::ArrayXXd a = s.coeffs().abs();
  const double thr = rel_tol * a.maxCoeff();
  int best = 0;
  for (int k = 0; k < a.cols(); ++k)
    if ((a.col(k) > thr).any()) best = std::max(best, std::abs(s.grid().signed_k(k)));
  return best;
}

int smooth_size_above(int n) {
  for (int m = n + 1;; ++m) {
    int r = m;
    for (int f : {2, 3, 5})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

namespace {

int padded_size(int band, const Rational& q, int out) {
  const std::int64_t need = (band * q.num) / q.den + out;
  return smooth_size_above(static_cast<int>(std::max<std::int64_t>(need, 2 * std::max(band, out))));
}

// Embeds the modes |j| <= bx, |k| <= by of s into an (mx/2+1, my) half spectrum,
// splitting Nyquist lines so the embedded interpolant stays real.
Eigen::ArrayXXcd embed(const Spectrum& s, int bx, int by, int mx, int my) {
  const Grid2D& g = s.grid();
  Eigen::ArrayXXcd out = Eigen::ArrayXXcd::Zero(mx / 2 + 1, my);
  const int nyq_y = -g.ny() / 2;
  for (int k = 0; k < g.ny(); ++k) {
    const int sk = g.signed_k(k);
    if (std::abs(sk) > by) continue;
    for (int j = 0; j <= bx; ++j) {
      std::complex<double> c = s.coeffs()(j, k);
      if (j == g.nx() / 2 && mx > g.nx()) c *= 0.5;
      if (sk == nyq_y && my > g.ny()) {
        out(j, my + sk) += 0.5 * c;
        out(j, -sk) += 0.5 * c;
      } else {
        out(j, sk >= 0 ? sk : my + sk) += c;
      }
    }
  }
  return out;
}

Eigen::ArrayXXd padded_samples(const Spectrum& s, int mx, int my, int bx, int by) {
  const Grid2D& g = s.grid();
  const double n = static_cast<double>(g.nx()) * g.ny();
  Eigen::ArrayXXcd e = embed(s, bx, by, mx, my);
  center_phase(e, my);
  return fft::c2r(e, mx) / std::sqrt(n);
}

Eigen::ArrayXXd padded_power_samples(const Spectrum& s, const Rational& q, bool odd_root, int mx, int my, int bx,
                                     int by) {
  Eigen::ArrayXXd u = padded_samples(s, mx, my, bx, by);
  const bool fractional = !(q.is_integer() && q.num >= 0);
  if (fractional && !odd_root) {
    const double lo = u.minCoeff();
    if (lo < 0.0) {
      if (lo < -1e-12 * u.abs().maxCoeff())
        fail(ErrorCode::NonIntegerPowerOnSignChangingField,
             "u^" + q.str() + " of a sign-changing field needs the odd_root convention");
      u = u.max(0.0);
    }
  }
  return u.unaryExpr([&](double v) { return real_power(v, q, odd_root); });
}

}  // namespace

Spectrum power_spectrum(const Spectrum& s, const Rational& q, bool odd_root, int kx_out, int ky_out) {
  if (s.coeffs().abs().maxCoeff() == 0.0) return power_spectrum(s, q, odd_root, 0, 0, kx_out, ky_out);
  return power_spectrum(s, q, odd_root, band_limit_x(s), band_limit_y(s), kx_out, ky_out);
}

Spectrum power_spectrum(const Spectrum& s, const Rational& q, bool odd_root, int bx, int by, int kx_out,
                        int ky_out) {
  const Grid2D& g = s.grid();
  if (kx_out >= g.nx() / 2 || ky_out >= g.ny() / 2 || kx_out < 0 || ky_out < 0)
    fail(ErrorCode::InvalidArgument, "output band must exclude the Nyquist lines");
  if (bx < 0 || by < 0 || bx > g.nx() / 2 || by > g.ny() / 2)
    fail(ErrorCode::InvalidArgument, "input band outside the grid");
  if (s.coeffs().abs().maxCoeff() == 0.0) return Spectrum::zeros(g);
  const int mx = padded_size(bx, q, kx_out);
  const int my = padded_size(by, q, ky_out);
  Eigen::ArrayXXcd v = fft::r2c(padded_power_samples(s, q, odd_root, mx, my, bx, by));
  center_phase(v, my);
  const double scale = std::sqrt(static_cast<double>(g.nx()) * g.ny()) / (static_cast<double>(mx) * my);
  Eigen::ArrayXXcd out = Eigen::ArrayXXcd::Zero(g.spectral_nx(), g.ny());
  for (int k = 0; k < g.ny(); ++k) {
    const int sk = g.signed_k(k);
    if (std::abs(sk) > ky_out) continue;
    const int mk = sk >= 0 ? sk : my + sk;
    for (int j = 0; j <= kx_out; ++j) out(j, k) = v(j, mk) * scale;
  }
  return Spectrum(g, std::move(out));
}

double power_integral(const Spectrum& s, const Rational& q, bool odd_root) {
  const Grid2D& g = s.grid();
  if (s.coeffs().abs().maxCoeff() == 0.0) return 0.0;
  const int bx = band_limit_x(s);
  const int by = band_limit_y(s);
  const int mx = padded_size(bx, q, 0);
  const int my = padded_size(by, q, 0);
  const Eigen::ArrayXXd v = padded_power_samples(s, q, odd_root, mx, my, bx, by);
  return g.lx() * g.ly() / (static_cast<double>(mx) * my) * v.sum();
}

double abs_power_integral(const Spectrum& s, const Rational& q) {
  const Grid2D& g = s.grid();
  if (s.coeffs().abs().maxCoeff() == 0.0) return 0.0;
  const int bx = band_limit_x(s);
  const int by = band_limit_y(s);
  const Rational qc = q.is_integer() ? q : Rational(q.num / q.den + 1);
  const int mx = padded_size(bx, qc, 0);
  const int my = padded_size(by, qc, 0);
  const double qv = q.value();
  const Eigen::ArrayXXd v = padded_samples(s, mx, my, bx, by).abs().pow(qv);
  return g.lx() * g.ly() / (static_cast<double>(mx) * my) * v.sum();
}

Spectrum resample(const Spectrum& s, const Grid2D& target) {
  const Grid2D& g = s.grid();
  if (g.lx() != target.lx() || g.ly() != target.ly())
    fail(ErrorCode::InvalidGrid, "resampling needs the same box");
  const double scale = std::sqrt(static_cast<double>(target.nx()) * target.ny() / (static_cast<double>(g.nx()) * g.ny()));
  if (target.nx() >= g.nx() && target.ny() >= g.ny())
    return Spectrum(target, embed(s, g.nx() / 2, g.ny() / 2, target.nx(), target.ny()) * scale);
  const int bx = std::min(g.nx() / 2, target.nx() / 2 - 1);
  const int by = std::min(g.ny() / 2, target.ny() / 2 - 1);
  Eigen::ArrayXXcd out = Eigen::ArrayXXcd::Zero(target.spectral_nx(), target.ny());
  for (int k = 0; k < g.ny(); ++k) {
    const int sk = g.signed_k(k);
    if (std::abs(sk) > by) continue;
    for (int j = 0; j <= bx; ++j) out(j, target.storage_k(sk)) = s.coeffs()(j, k) * scale;
  }
  return Spectrum(target, std::move(out));
}

Eigen::ArrayXXd evaluate_scaled(const Spectrum& s, double a, double b, double sx, double sy) {
  const Grid2D& g = s.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const int nh = g.spectral_nx();
  Eigen::MatrixXcd ex(nx, nh);
  for (int j = 0; j < nh; ++j) {
    const double xi = g.xi(j);
    for (int i = 0; i < nx; ++i) {
      const double ph = xi * (a * g.x(i) + sx);
      if (j == 0)
        ex(i, j) = 1.0;
      else if (j == nx / 2)
        ex(i, j) = std::cos(ph);
      else
        ex(i, j) = 2.0 * std::polar(1.0, ph);
    }
  }
  const Eigen::MatrixXcd t = ex * s.coeffs().matrix();
  Eigen::ArrayXXd out(nx, ny);
  const double scale = 1.0 / std::sqrt(static_cast<double>(nx) * ny);
  constexpr int kBlock = 256;
  for (int r0 = 0; r0 < ny; r0 += kBlock) {
    const int nr = std::min(kBlock, ny - r0);
    Eigen::MatrixXcd ey(ny, nr);
    for (int r = 0; r < nr; ++r) {
      const double y = b * g.y(r0 + r) + sy;
      for (int k = 0; k < ny; ++k) {
        const double ph = g.mu(k) * y;
        ey(k, r) = g.signed_k(k) == -ny / 2 ? std::complex<double>(std::cos(ph), 0.0) : std::polar(1.0, ph);
      }
    }
    out.middleCols(r0, nr) = (t * ey).real().array() * scale;
  }
  return out;
}

}  // namespace kp5
