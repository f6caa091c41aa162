#pragma once

#include <Eigen/Core>

namespace kp5::fft {

// Unnormalized FFTW transforms on column-major arrays (x fastest).
// Plans are created with FFTW_ESTIMATE, which keeps results reproducible run to
// run, and cached per thread.

/// (nx, ny) real -> (nx/2+1, ny) complex.
Eigen::ArrayXXcd r2c(const Eigen::ArrayXXd& u);

/// (nx/2+1, ny) complex -> (nx, ny) real. The input is not modified.
Eigen::ArrayXXd c2r(const Eigen::ArrayXXcd& c, int nx);

/// 1D complex transforms of length n; sign -1 is forward.
Eigen::VectorXcd dft(const Eigen::VectorXcd& v, int sign);

}  // namespace kp5::fft
