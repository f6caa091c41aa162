#include "kp5/cutoffs.hpp"

#include <cmath>

namespace kp5 {

namespace {

double f(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

}  // namespace

double smooth_step(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double a = f(1.0 - s);
  return a / (a + f(s));
}

double psi0(double r) { return smooth_step((std::abs(r) - 1.25) / 0.35); }

double psi1(double r) {
  const double a = std::abs(r);
  return smooth_step(1.0 - (a - 0.25) / 0.25) * smooth_step((a - 2.0) / 2.0);
}

}  // namespace kp5
