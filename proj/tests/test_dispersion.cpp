#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "kp5/cutoffs.hpp"
#include "kp5/dispersion.hpp"
#include "kp5/error.hpp"

using namespace kp5;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
cd simpson(const F& f, double a, double b, long n) {
  const double h = (b - a) / static_cast<double>(n);
  cd s = f(a) + f(b);
  for (long k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + static_cast<double>(k) * h);
  return s * h / 3.0;
}

// int exp(i(t xi^5 + x xi)) psi1(xi/N) d xi, both half lines.
double phase1d_direct(double N, double t, double x) {
  const double om = 5.0 * t * std::pow(4.0 * N, 4) + std::abs(x);
  const long n = 2 * static_cast<long>(std::ceil(3.75 * N * (om + 400.0) / kPi));
  auto f = [&](double xi) { return psi1(xi / N) * std::polar(1.0, t * std::pow(xi, 5) + x * xi); };
  return 2.0 * simpson(f, N / 4.0, 4.0 * N, n).real();
}

// G(x, y, t) with the mu integral regularized by psi0(mu/R) and done by trapezoid
// at every xi node of an outer trapezoid rule.
double kernel2d_brute(double N, double t, double x, double y, double R) {
  const double omx = 5.0 * t * std::pow(4.0 * N, 4) + std::abs(x) + y * y / (4.0 * t);
  const long mx = static_cast<long>(std::ceil(3.75 * N * (1.5 * omx + 400.0) / (2.0 * kPi))) + 1;
  const double dxi = 3.75 * N / static_cast<double>(mx - 1);
  const double L = 1.6 * R;
  double acc = 0.0;
  for (long i = 0; i < mx; ++i) {
    const double xi = N / 4.0 + static_cast<double>(i) * dxi;
    const double c = psi1(xi / N);
    if (c == 0.0) continue;
    const double a = t / xi;
    const double om = std::abs(y) + 2.0 * a * L;
    const long mm = static_cast<long>(std::ceil(2.0 * L * (1.5 * om + 200.0) / (2.0 * kPi))) + 1;
    const double dm = 2.0 * L / static_cast<double>(mm - 1);
    cd s = 0.0;
    for (long k = 0; k < mm; ++k) {
      const double mu = -L + static_cast<double>(k) * dm;
      const double w = psi0(mu / R);
      if (w != 0.0) s += w * std::polar(1.0, y * mu + a * mu * mu);
    }
    acc += 2.0 * (c * std::polar(1.0, x * xi + t * std::pow(xi, 5)) * s * dm).real();
  }
  return std::abs(acc * dxi);
}

double t_slope(const DecayFit& f) { return f.slopes.at(0); }

}  // namespace

// ---------------------------------------------------------------- cutoffs

TEST(Cutoffs, SupportPlateauAndRangeOnLattice) {
  for (int i = -5000; i <= 5000; ++i) {
    const double r = i * 1e-3;
    const double a = std::abs(r);
    const double c0 = psi0(r), c1 = psi1(r);
    ASSERT_GE(c0, 0.0);
    ASSERT_LE(c0, 1.0);
    ASSERT_GE(c1, 0.0);
    ASSERT_LE(c1, 1.0);
    ASSERT_EQ(c0, psi0(-r));
    ASSERT_EQ(c1, psi1(-r));
    if (a <= 1.25) ASSERT_EQ(c0, 1.0) << r;
    if (a >= 1.6) ASSERT_EQ(c0, 0.0) << r;
    if (a > 1.26 && a < 1.59) ASSERT_GT(c0, 0.0) << r;
    if (a > 1.27 && a < 1.58) ASSERT_LT(c0, 1.0) << r;
    if (a >= 0.5 && a <= 2.0) ASSERT_EQ(c1, 1.0) << r;
    if (a <= 0.25 || a >= 4.0) ASSERT_EQ(c1, 0.0) << r;
    if ((a > 0.26 && a < 0.49) || (a > 2.01 && a < 3.99)) ASSERT_GT(c1, 0.0) << r;
    if ((a > 0.27 && a < 0.48) || (a > 2.1 && a < 3.9)) ASSERT_LT(c1, 1.0) << r;
  }
}

TEST(Cutoffs, SmoothStepIsMonotoneAndAntisymmetric) {
  double prev = 1.0;
  for (int i = -100; i <= 1100; ++i) {
    const double s = i * 1e-3;
    const double v = smooth_step(s);
    ASSERT_LE(v, prev);
    prev = v;
    ASSERT_NEAR(v + smooth_step(1.0 - s), 1.0, 1e-15);
  }
}

TEST(Cutoffs, IntegralsMatchIndependentQuadrature) {
  auto f1 = [](double r) { return cd(psi1(r), 0.0); };
  auto f2 = [](double r) { return cd(psi1(r) * psi1(r), 0.0); };
  const double s1 = 2.0 * simpson(f1, 0.25, 4.0, 2'000'000).real();
  const double s2 = 2.0 * simpson(f2, 0.25, 4.0, 2'000'000).real();
  EXPECT_NEAR(psi1_integral(1), s1, 1e-12 * s1);
  EXPECT_NEAR(psi1_integral(2), s2, 1e-12 * s2);
  // Antisymmetry of the step makes each ramp integrate to half its width.
  EXPECT_NEAR(psi1_integral(1), 2.0 * (0.125 + 1.5 + 1.0), 1e-12);
}

// ---------------------------------------------------------------- phase1d

TEST(Phase1d, SmallTimeLimitIsCutoffIntegral) {
  const double I = psi1_integral(1);
  for (double N : {1.0, 2.0, 4.0, 8.0}) {
    const double t = 1e-14 / std::pow(N, 5);
    const OscillatorySup s = phase1d_sup(N, t);
    EXPECT_NEAR(s.value, N * I, 1e-10 * N * I) << N;
  }
}

TEST(Phase1d, AgreesWithDenseScanOfDirectQuadrature) {
  const double N = 1.0, t = 10.0;
  const OscillatorySup s = phase1d_sup(N, t);
  double scan = 0.0;
  for (double x = -40.0; x <= 40.0; x += 0.01) scan = std::max(scan, std::abs(phase1d_direct(N, t, x)));
  EXPECT_LE(scan, s.value * (1.0 + 1e-9));
  EXPECT_GE(scan, s.value * (1.0 - 1e-4));
  EXPECT_NEAR(std::abs(phase1d_direct(N, t, s.x)), s.value, 1e-9 * s.value);
}

TEST(Phase1d, TimeReversalMirrorsX) {
  const OscillatorySup a = phase1d_sup(2.0, 0.05);
  const OscillatorySup b = phase1d_sup(2.0, -0.05);
  EXPECT_NEAR(a.value, b.value, 1e-12 * a.value);
  EXPECT_NEAR(a.x, -b.x, 1e-9);
}

TEST(Phase1d, ScalesExactlyInN) {
  const double tau = 50.0;
  const double base = phase1d_sup(1.0, tau).value;
  for (double N : {2.0, 4.0}) EXPECT_NEAR(phase1d_sup(N, tau / std::pow(N, 5)).value, N * base, 1e-12 * N * base);
}

TEST(Phase1d, RefinementChangeIsEnforced) {
  const OscillatorySup s = phase1d_sup(1.0, 300.0);
  EXPECT_LT(s.refinement_change, 1e-8);
  EXPECT_GT(s.nodes, 0);
}

TEST(Phase1d, RejectsBadArguments) {
  EXPECT_THROW(phase1d_sup(0.0, 1.0), Error);
  EXPECT_THROW(phase1d_sup(1.0, 0.0), Error);
  EXPECT_THROW(phase1d_sup(1.0, 1.0, 2.0, 1.0), Error);
}

TEST(Phase1d, TimeSlopeFromTenToTenThousand) {
  const DecayFit f = fit_exponents(phase1d_samples({1.0}, log_space(10.0, 1e4, 16)), {-0.5, 1.0}, {"t", "N"});
  EXPECT_NEAR(t_slope(f), -0.5, 0.05);
}

TEST(Phase1d, TimeSlopeInLargeTauRegime) {
  const DecayFit f = fit_exponents(phase1d_samples({1.0}, log_space(100.0, 1e4, 11)), {-0.5, 1.0}, {"t", "N"});
  EXPECT_GE(t_slope(f), -0.55);
  EXPECT_LE(t_slope(f), -0.45);
  EXPECT_TRUE(std::isnan(f.slopes[1]));
}

TEST(Phase1d, BoundFamilyHoldsWithOneConstant) {
  const auto samples = phase1d_samples({1.0, 2.0, 4.0, 8.0}, log_space(100.0, 1000.0, 8));
  for (double theta : {0.0, 0.25, 0.5}) {
    const DecayFit f = fit_exponents(samples, {-theta, 1.0 - 5.0 * theta}, {"t", "N"});
    EXPECT_EQ(f.violations, 0) << theta;
    EXPECT_TRUE(std::isfinite(f.bound_constant));
    for (const auto& s : f.samples)
      EXPECT_LE(s.value, f.bound_constant * std::pow(s.params[0], -theta) * std::pow(s.params[1], 1.0 - 5.0 * theta) *
                             (1.0 + kBoundSlack));
  }
}

// ---------------------------------------------------------------- kernel2d

TEST(Kernel2d, FresnelReductionMatchesBruteForce) {
  for (double N : {1.0, 1.5, 2.0})
    for (double t : {0.25, 0.5, 1.0}) {
      const OscillatorySup s = kernel2d_sup(N, t);
      const double y = 0.5;
      const double x = s.x + y * y / (4.0 * t);
      const double reduced = kernel2d_abs(N, t, x, y);
      EXPECT_NEAR(reduced, s.value, 1e-9 * s.value);
      const double brute = kernel2d_brute(N, t, x, y, 40.0);
      EXPECT_NEAR(brute, reduced, 1e-3 * reduced) << N << " " << t;
    }
}

TEST(Kernel2d, TransverseShiftLeavesSupInvariant) {
  const double N = 1.0, t = 0.5;
  const OscillatorySup s = kernel2d_sup(N, t);
  for (double y : {0.0, 1.0, -3.0})
    EXPECT_NEAR(kernel2d_abs(N, t, s.x + y * y / (4.0 * t), y), s.value, 1e-9 * s.value);
}

TEST(Kernel2d, TimeSlopeOverTwoDecades) {
  const DecayFit f = fit_exponents(kernel2d_samples({1.0}, log_space(30.0, 3000.0, 11)), {-1.0, -1.0}, {"t", "N"});
  EXPECT_GE(t_slope(f), -1.05);
  EXPECT_LE(t_slope(f), -0.95);
}

TEST(Kernel2d, BoundFamilyHoldsWithOneConstant) {
  const auto samples = kernel2d_samples({1.0, 2.0, 4.0, 8.0}, log_space(100.0, 1000.0, 8));
  for (double theta : {0.0, 0.25, 0.5}) {
    const DecayFit f = fit_exponents(samples, {-0.5 - theta, 1.5 - 5.0 * theta}, {"t", "N"});
    EXPECT_EQ(f.violations, 0) << theta;
  }
}

// ---------------------------------------------------------------- cylinder

TEST(Cylinder, LevelZeroBoundHasNoViolations) {
  const DecayFit f = cylinder_kernel(0, 0, 6, 3);
  EXPECT_EQ(f.samples.size(), 21u);
  EXPECT_EQ(f.violations, 0);
  EXPECT_GT(f.bound_constant, 0.0);
}

TEST(Cylinder, SupMatchesDirectSummation) {
  for (int j : {0, 1, 2}) {
    const CylinderSup s = cylinder_sup(j, 2 * j + 1, 2);
    EXPECT_NEAR(std::abs(cylinder_kernel_value(j, s.x, s.y, s.t)), s.value, 1e-10 * s.value) << j;
    EXPECT_LT(s.refinement_change, 1e-8);
  }
}

TEST(Cylinder, DenseScanDoesNotBeatSup) {
  const double t = 0.25;
  const CylinderSup s = cylinder_sup_at(0, t);
  double scan = 0.0;
  for (double y : {0.0, kPi / 4, kPi / 2, 3 * kPi / 4, kPi})
    for (double x = -12.0; x <= 12.0; x += 0.01) scan = std::max(scan, std::abs(cylinder_kernel_value(0, x, y, t)));
  EXPECT_LE(scan, s.value * (1.0 + 1e-9));
  EXPECT_GE(scan, s.value * (1.0 - 1e-4));
}

TEST(Cylinder, SmallTimeLimitIsClosedForm) {
  for (int j = 0; j <= 3; ++j) {
    const double closed = psi0_squared_lattice_sum(j) * std::ldexp(psi1_integral(2), j);
    EXPECT_NEAR(cylinder_kernel_value(j, 0.0, 0.0, 1e-12), closed, 1e-8 * closed) << j;
  }
}

TEST(Cylinder, PerLevelSlopeMatchesBoundExponent) {
  const double r = cylinder_sup(3, 6, 3).value / cylinder_sup(2, 4, 3).value;
  EXPECT_NEAR(std::log2(r), -2.9 + 2.0, 0.15);
}

TEST(Cylinder, GuardsLevels) {
  try {
    cylinder_sup_at(6, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LatticeTooLarge);
  }
  EXPECT_THROW(cylinder_sup(1, 1, 1), Error);
  EXPECT_THROW(cylinder_sup(1, 13, 1), Error);
  EXPECT_THROW(cylinder_samples(0, 3, 2, 1), Error);
}

TEST(Poisson, ImagesReproduceLatticeSum) {
  for (int j : {0, 1, 2})
    for (double a : {0.0, 0.01, 0.3})
      for (double y : {0.0, 0.7, kPi}) {
        const cd A = lattice_sum(j, a, y);
        const cd P = poisson_images(j, a, y, 0, 200);
        EXPECT_LT(std::abs(A - P), 1e-10 * std::max(1.0, std::abs(A))) << j << " " << a << " " << y;
      }
}

TEST(Poisson, FarImageTailIsBelowBound) {
  EXPECT_LE(poisson_tail_max(2), 10.0 * std::pow(2.0, -12));
}

// ---------------------------------------------------------------- fits

TEST(FitExponents, ExactPowerLaw) {
  std::vector<DecaySample> s;
  for (double x : log_space(1.0, 100.0, 11)) s.push_back({{x}, std::pow(x, -2.0)});
  const DecayFit f = fit_exponents(s, {-2.0});
  EXPECT_NEAR(f.slopes[0], -2.0, 1e-12);
  EXPECT_NEAR(f.bound_constant, 1.0, 1e-12);
  EXPECT_EQ(f.violations, 0);
  EXPECT_LT(f.slope_errors[0], 1e-12);
}

TEST(FitExponents, NoisyPowerLaw) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  std::vector<DecaySample> s;
  for (double x : log_space(1.0, 1000.0, 31)) s.push_back({{x}, 3.0 * std::pow(x, -0.5) * (1.0 + noise(rng))});
  const DecayFit f = fit_exponents(s, {-0.5});
  EXPECT_NEAR(f.slopes[0], -0.5, 0.02);
  EXPECT_EQ(f.violations, 0);
  EXPECT_GT(f.slope_errors[0], 0.0);
}

TEST(FitExponents, ConstantSamples) {
  std::vector<DecaySample> s;
  for (double x : log_space(1.0, 10.0, 6)) s.push_back({{x}, 4.0});
  const DecayFit f = fit_exponents(s, {0.0});
  EXPECT_NEAR(f.slopes[0], 0.0, 1e-12);
}

TEST(FitExponents, TwoParameterRecovery) {
  std::vector<DecaySample> s;
  for (double t : log_space(1.0, 100.0, 6))
    for (double N : {1.0, 2.0, 4.0, 8.0}) s.push_back({{t, N}, 2.0 * std::pow(t, -0.5) * std::pow(N, -1.5)});
  const DecayFit f = fit_exponents(s, {-0.25, -0.25});
  EXPECT_NEAR(f.slopes[0], -0.5, 1e-12);
  EXPECT_NEAR(f.slopes[1], -1.5, 1e-12);
  EXPECT_EQ(f.violations, 0);
}

TEST(FitExponents, Guards) {
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  std::vector<DecaySample> few;
  for (double x : {1.0, 2.0, 3.0, 4.0}) few.push_back({{x}, x});
  EXPECT_EQ(code([&] { fit_exponents(few, {1.0}); }), ErrorCode::InsufficientSamples);
  std::vector<DecaySample> sparse;
  for (double x : log_space(1.0, 1e3, 6)) sparse.push_back({{x}, x});
  EXPECT_EQ(code([&] { fit_exponents(sparse, {1.0}); }), ErrorCode::InsufficientSamples);
  std::vector<DecaySample> collinear;
  for (double x : log_space(1.0, 10.0, 10)) collinear.push_back({{x, x}, x});
  EXPECT_EQ(code([&] { fit_exponents(collinear, {1.0, 0.0}); }), ErrorCode::InsufficientSamples);
  std::vector<DecaySample> bad(6, DecaySample{{1.0}, 0.0});
  EXPECT_EQ(code([&] { fit_exponents(bad, {1.0}); }), ErrorCode::InvalidArgument);
}
