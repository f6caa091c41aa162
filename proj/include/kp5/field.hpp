#pragma once

#include <complex>

#include <Eigen/Core>

#include "kp5/grid.hpp"

namespace kp5 {

/// Real samples u(x_i, y_k) stored as an nx-by-ny column-major array, so x is
/// the fastest index in memory.
class Field {
 public:
  Field(const Grid2D& grid, Eigen::ArrayXXd values);

  static Field zeros(const Grid2D& grid);

  template <class F>
  static Field sample(const Grid2D& grid, F&& f) {
    Eigen::ArrayXXd v(grid.nx(), grid.ny());
    for (int k = 0; k < grid.ny(); ++k)
      for (int i = 0; i < grid.nx(); ++i) v(i, k) = f(grid.x(i), grid.y(k));
    return Field(grid, std::move(v));
  }

  const Grid2D& grid() const { return grid_; }
  const Eigen::ArrayXXd& values() const { return values_; }
  double operator()(int i, int k) const { return values_(i, k); }

  double max_abs() const { return values_.abs().maxCoeff(); }
  bool is_nonnegative() const { return (values_ >= 0.0).all(); }

  /// Largest |sum_x u(., y_k)| relative to the l2 norm of the samples.
  double x_mean_defect() const;

  Field scaled(double a) const { return Field(grid_, a * values_); }

 private:
  Grid2D grid_;
  Eigen::ArrayXXd values_;
};

/// Half spectrum of a real field, coefficients of exp(i(xi x + mu y)) with x, y
/// the centered box coordinates. Rows j = 0..nx/2, columns k in FFT order
/// (k = 0..ny/2-1, then -ny/2..-1). Negative j follow from Hermitian symmetry.
class Spectrum {
 public:
  Spectrum(const Grid2D& grid, Eigen::ArrayXXcd coeffs);

  static Spectrum zeros(const Grid2D& grid);

  const Grid2D& grid() const { return grid_; }
  const Eigen::ArrayXXcd& coeffs() const { return coeffs_; }
  Eigen::ArrayXXcd& coeffs() { return coeffs_; }

  /// Coefficient at signed indices, j in [-nx/2, nx/2], k in [-ny/2, ny/2).
  std::complex<double> at(int j, int k) const;

  /// Largest violation of c(0,-k) = conj c(0,k) and of the same relation on
  /// the j = nx/2 row, relative to max |c|.
  double hermitian_defect() const;

 private:
  Grid2D grid_;
  Eigen::ArrayXXcd coeffs_;
};

}  // namespace kp5
