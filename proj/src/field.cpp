#include "kp5/field.hpp"

#include <algorithm>
#include <cmath>

#include "kp5/error.hpp"

namespace kp5 {

Field::Field(const Grid2D& grid, Eigen::ArrayXXd values) : grid_(grid), values_(std::move(values)) {
  if (values_.rows() != grid_.nx() || values_.cols() != grid_.ny())
    fail(ErrorCode::InvalidField, "sample array does not match the grid");
  if (!values_.isFinite().all()) fail(ErrorCode::InvalidField, "non-finite sample");
}

Field Field::zeros(const Grid2D& grid) { return Field(grid, Eigen::ArrayXXd::Zero(grid.nx(), grid.ny())); }

double Field::x_mean_defect() const {
  const double norm = std::sqrt(values_.square().sum());
  if (norm == 0.0) return 0.0;
  return values_.colwise().sum().abs().maxCoeff() / norm;
}

Spectrum::Spectrum(const Grid2D& grid, Eigen::ArrayXXcd coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.rows() != grid_.spectral_nx() || coeffs_.cols() != grid_.ny())
    fail(ErrorCode::InvalidSpectrum, "coefficient array does not match the grid");
}

Spectrum Spectrum::zeros(const Grid2D& grid) {
  return Spectrum(grid, Eigen::ArrayXXcd::Zero(grid.spectral_nx(), grid.ny()));
}

std::complex<double> Spectrum::at(int j, int k) const {
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  if (j < -nx / 2 || j > nx / 2 || k < -ny / 2 || k >= ny / 2)
    fail(ErrorCode::InvalidArgument, "wavenumber index out of range");
  if (j >= 0) return coeffs_(j, grid_.storage_k(k));
  const int kk = k == -ny / 2 ? k : -k;
  return std::conj(coeffs_(-j, grid_.storage_k(kk)));
}

double Spectrum::hermitian_defect() const {
  const double scale = coeffs_.abs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const int ny = grid_.ny();
  double worst = 0.0;
  for (int j : {0, grid_.nx() / 2}) {
    for (int k = 0; k < ny; ++k) {
      const int mk = (ny - k) % ny;
      worst = std::max(worst, std::abs(coeffs_(j, k) - std::conj(coeffs_(j, mk))));
    }
  }
  return worst / scale;
}

}  // namespace kp5
