#pragma once

#include <cmath>
#include <numbers>
#include <string>

namespace kp5 {

enum class GridMode { PlaneApprox, Cylinder };

std::string to_string(GridMode mode);
GridMode grid_mode_from_string(const std::string& text);

/// Periodic box [-lx/2, lx/2) x [-ly/2, ly/2) sampled on nx x ny points.
///
/// Wavenumbers: xi_j = 2 pi j / lx, mu_k = 2 pi k / ly with signed indices in
/// [-n/2, n/2). In Cylinder mode ly is 2 pi, so mu_k = k is the integer
/// transverse frequency.
class Grid2D {
 public:
  Grid2D(int nx, int ny, double lx, double ly, GridMode mode = GridMode::PlaneApprox);

  static Grid2D cylinder(int nx, int ny, double lx);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  GridMode mode() const { return mode_; }

  /// Number of stored x-frequencies in the half spectrum (j = 0 .. nx/2).
  int spectral_nx() const { return nx_ / 2 + 1; }

  double dx() const { return lx_ / nx_; }
  double dy() const { return ly_ / ny_; }
  double cell_area() const { return dx() * dy(); }

  double x(int i) const { return -0.5 * lx_ + i * dx(); }
  double y(int k) const { return -0.5 * ly_ + k * dy(); }

  /// Signed frequency index of storage row k along y.
  int signed_k(int k) const { return k < ny_ / 2 ? k : k - ny_; }
  /// Storage index of signed y-frequency k.
  int storage_k(int k) const { return k >= 0 ? k : k + ny_; }

  double xi(int j) const { return 2.0 * std::numbers::pi * j / lx_; }
  double mu(int k_storage) const { return 2.0 * std::numbers::pi * signed_k(k_storage) / ly_; }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  int nx_;
  int ny_;
  double lx_;
  double ly_;
  GridMode mode_;
};

}  // namespace kp5
