#include "kp5/grid.hpp"

#include "kp5/error.hpp"

namespace kp5 {

namespace {
bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

std::string to_string(GridMode mode) { return mode == GridMode::Cylinder ? "Cylinder" : "PlaneApprox"; }

GridMode grid_mode_from_string(const std::string& text) {
  if (text == "Cylinder" || text == "cylinder") return GridMode::Cylinder;
  if (text == "PlaneApprox" || text == "plane") return GridMode::PlaneApprox;
  fail(ErrorCode::InvalidArgument, "unknown grid mode '" + text + "'");
}

Grid2D::Grid2D(int nx, int ny, double lx, double ly, GridMode mode)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly), mode_(mode) {
  if (!is_pow2(nx) || !is_pow2(ny) || nx < 2 || ny < 2)
    fail(ErrorCode::InvalidGrid, "nx and ny must be powers of two >= 2");
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    fail(ErrorCode::InvalidGrid, "box lengths must be positive");
  if (mode == GridMode::Cylinder && ly != 2.0 * std::numbers::pi)
    fail(ErrorCode::InvalidGrid, "cylinder grids need ly = 2 pi");
}

Grid2D Grid2D::cylinder(int nx, int ny, double lx) {
  return Grid2D(nx, ny, lx, 2.0 * std::numbers::pi, GridMode::Cylinder);
}

}  // namespace kp5
