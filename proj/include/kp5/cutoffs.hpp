#pragma once

namespace kp5 {

/// C-infinity step: 1 for s <= 0, 0 for s >= 1, built from exp(-1/s).
double smooth_step(double s);

/// Even bump: 1 on |r| <= 5/4, 0 for |r| >= 8/5.
double psi0(double r);

/// Even annulus bump: 1 on 1/2 <= |r| <= 2, 0 outside 1/4 < |r| < 4.
double psi1(double r);

}  // namespace kp5
