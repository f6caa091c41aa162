#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kp5/error.hpp"
#include "kp5/functionals.hpp"
#include "kp5/fft.hpp"
#include "testutil.hpp"

using namespace kp5;

namespace {

constexpr double kPi = std::numbers::pi;

Field sinsin(int n = 32) {
  return Field::sample(Grid2D(n, n, 2 * kPi, 2 * kPi), [](double x, double y) { return std::sin(x) * std::sin(y); });
}

// Rescales a localized field so that K vanishes: alpha^p = (M + ||u_xx||^2) / (c_p P).
Field k_zero(const Field& v) {
  const FunctionalReport r = functional_report(v, Power(2));
  const double cp = 6.0 / 8.0;
  return v.scaled(std::sqrt((r.mass + r.dxx_norm2) / (cp * r.potential)));
}

}  // namespace

TEST(Mass, ZeroField) { EXPECT_EQ(mass(Field::zeros(Grid2D(16, 16, 1.0, 1.0))), 0.0); }

TEST(Mass, SinSinOnTwoPiBox) { EXPECT_NEAR(mass(sinsin()), kPi * kPi, 1e-12); }

TEST(Mass, MatchesTrapezoidSum) {
  std::mt19937_64 rng(1);
  const Grid2D g(64, 128, 30.0, 50.0);
  const Field u = kp5::testing::random_field(g, rng);
  const double direct = g.cell_area() * u.values().square().sum();
  EXPECT_NEAR(mass(u), direct, 1e-12 * direct);
}

TEST(Energy, ZeroField) { EXPECT_EQ(energy(Field::zeros(Grid2D(16, 16, 1.0, 1.0)), Power(2)), 0.0); }

TEST(Energy, SinSinCubic) {
  const double expected = kPi * kPi - 9.0 * kPi * kPi / 64.0;
  EXPECT_NEAR(energy(sinsin(), Power(2)), expected, 1e-12 * expected);
}

TEST(Energy, StableUnderRefinement) {
  std::mt19937_64 rng(2);
  const Grid2D g(128, 128, 40.0, 40.0);
  const Grid2D fine(256, 256, 40.0, 40.0);
  for (int trial = 0; trial < 3; ++trial) {
    const Field u = kp5::testing::random_localized_field(g, rng);
    const Field uf = inverse(resample(forward(u), fine));
    for (int p : {1, 2, 3}) {
      const double e = energy(u, Power(p));
      EXPECT_NEAR(energy(uf, Power(p)), e, 1e-8 * std::abs(e)) << p;
    }
  }
}

TEST(FunctionalReport, SinSinComponents) {
  const FunctionalReport r = functional_report(sinsin(), Power(2), 1.0);
  const double pi2 = kPi * kPi;
  EXPECT_NEAR(r.Q, pi2 - 9.0 * pi2 / 64.0, 1e-12);
  EXPECT_NEAR(r.dxx_norm2, pi2, 1e-12);
  EXPECT_NEAR(r.dxinvdy_norm2, pi2, 1e-12);
  EXPECT_NEAR(r.l4_norm4, 9.0 * pi2 / 16.0, 1e-12);
  EXPECT_NEAR(r.I, 3 * pi2 - 9.0 * pi2 / 16.0, 1e-12);
  EXPECT_NEAR(r.K, 2 * pi2 - 6.0 / 8.0 * 9.0 * pi2 / 16.0, 1e-12);
}

TEST(FunctionalReport, ZeroFieldAllZero) {
  const FunctionalReport r = functional_report(Field::zeros(Grid2D(16, 16, 3.0, 3.0)), Power(2), 1.0);
  for (double v : {r.mass, r.energy, r.L1, r.I, r.K, r.Q, r.J, r.es_norm2, r.dy_norm, r.l4_norm4}) EXPECT_EQ(v, 0.0);
}

TEST(FunctionalReport, L1Consistency) {
  std::mt19937_64 rng(3);
  const Grid2D g(64, 64, 40.0, 40.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Field u = kp5::testing::random_localized_field(g, rng);
    for (double c : {0.5, 1.0, 2.0}) {
      const FunctionalReport r = functional_report(u, Power(2), c);
      EXPECT_NEAR(r.L1, r.energy + 0.5 * c * r.mass, 1e-12 * std::abs(r.L1));
      EXPECT_NEAR(r.Q, r.I - r.K, 1e-12 * (std::abs(r.I) + std::abs(r.K)));
    }
  }
}

TEST(FunctionalReport, NonnegativeQuantities) {
  std::mt19937_64 rng(4);
  const Grid2D g(64, 64, 40.0, 40.0);
  for (int trial = 0; trial < 5; ++trial) {
    const FunctionalReport r = functional_report(kp5::testing::random_localized_field(g, rng), Power(2));
    EXPECT_GE(r.mass, 0.0);
    EXPECT_GE(r.J, 0.0);
    EXPECT_GE(r.es_norm2, 0.0);
    EXPECT_GE(r.dy_norm, 0.0);
    EXPECT_GE(r.l4_norm4, 0.0);
  }
}

TEST(FunctionalReport, FractionalPowerNeedsConvention) {
  const Field u = sinsin();
  EXPECT_THROW(functional_report(u, Power(Rational(4, 3))), Error);
  EXPECT_NO_THROW(functional_report(u, Power(Rational(4, 3), true)));
}

TEST(EsNorm, ZeroOrderIsL2PlusTransverse) {
  std::mt19937_64 rng(5);
  const Field u = kp5::testing::random_localized_field(Grid2D(64, 64, 40.0, 40.0), rng);
  const FunctionalReport r = functional_report(u, Power(2));
  EXPECT_NEAR(es_norm(u, 0.0), std::sqrt(r.mass) + std::sqrt(r.dxinvdy_norm2), 1e-12);
}

TEST(EsNorm, SingleModeWeight) {
  const Grid2D g(32, 32, 2 * kPi, 2 * kPi);
  const Field u = Field::sample(g, [](double x, double) { return std::sin(x); }).scaled(1.0 / std::sqrt(2 * kPi * kPi));
  ASSERT_NEAR(mass(u), 1.0, 1e-12);
  EXPECT_NEAR(es_norm(u, 2.0), 4.0, 1e-12);
}

TEST(EsNorm, MatchesNaiveLoop) {
  std::mt19937_64 rng(6);
  const Grid2D g(32, 16, 11.0, 7.0);
  const Field u = kp5::testing::random_field(g, rng);
  const Spectrum s = forward(u);
  const double sp = 1.3;
  double a = 0.0, b = 0.0;
  for (int j = -g.nx() / 2; j < g.nx() / 2; ++j)
    for (int k = -g.ny() / 2; k < g.ny() / 2; ++k) {
      const double xi = 2 * kPi * j / g.lx();
      const double mu = 2 * kPi * k / g.ly();
      const double c2 = std::norm(s.at(j, k));
      a += std::pow(1.0 + std::abs(xi), 2 * sp) * c2;
      if (j != 0) b += mu * mu / (xi * xi) * c2;
    }
  const double naive = std::sqrt(g.cell_area() * a) + std::sqrt(g.cell_area() * b);
  EXPECT_NEAR(es_norm(u, sp), naive, 1e-12 * naive);
}

TEST(ZsNorm, ZeroField) { EXPECT_EQ(zs_norm(Field::zeros(Grid2D::cylinder(16, 16, 2 * kPi)), 2.0), 0.0); }

TEST(ZsNorm, SingleModeWeight) {
  const Grid2D g = Grid2D::cylinder(32, 32, 2 * kPi);
  const Field u = Field::sample(g, [](double x, double y) { return std::sin(x + y); }).scaled(1.0 / std::sqrt(2 * kPi * kPi));
  ASSERT_NEAR(mass(u), 1.0, 1e-12);
  EXPECT_NEAR(zs_norm(u, 2.0), 3.0, 1e-12);
}

TEST(ZsNorm, MatchesNaiveLoop) {
  std::mt19937_64 rng(7);
  const Grid2D g = Grid2D::cylinder(32, 16, 9.0);
  const Field u = kp5::testing::random_field(g, rng);
  const Spectrum s = forward(u);
  double acc = 0.0;
  for (int j = -g.nx() / 2; j < g.nx() / 2; ++j) {
    if (j == 0) continue;
    for (int n = -g.ny() / 2; n < g.ny() / 2; ++n) {
      const double xi = 2 * kPi * j / g.lx();
      const double w = 1.0 + std::pow(std::abs(xi), 4.0) + std::abs(n) / std::abs(xi);
      acc += w * w * std::norm(s.at(j, n));
    }
  }
  const double naive = std::sqrt(g.cell_area() * acc);
  EXPECT_NEAR(zs_norm(u, 2.0), naive, 1e-12 * naive);
}

TEST(ZsNorm, PlaneGridIsWrongMode) {
  try {
    zs_norm(Field::zeros(Grid2D(16, 16, 1.0, 1.0)), 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongMode);
  }
}

TEST(CylinderEnergy, ReducesToOneDimensionalEnergy) {
  const Grid2D g = Grid2D::cylinder(128, 16, 30.0);
  auto f = [](double x) { return -2 * x * std::exp(-x * x / 4.0) * 0.5; };
  const Field u = Field::sample(g, [&](double x, double) { return f(x); });
  // One-dimensional reference by FFT on the x line, times the 2 pi period.
  const int n = g.nx();
  Eigen::VectorXcd line(n);
  for (int i = 0; i < n; ++i) line(i) = f(g.x(i));
  const Eigen::VectorXcd c = kp5::fft::dft(line, -1);
  double kin = 0.0, quart = 0.0;
  for (int j = 0; j < n; ++j) {
    const int sj = j < n / 2 ? j : j - n;
    const double xi = 2 * kPi * sj / g.lx();
    kin += std::pow(xi, 4) * std::norm(c(j));
  }
  kin *= g.dx() / n;
  for (int i = 0; i < n; ++i) quart += std::pow(f(g.x(i)), 4) * g.dx();
  const double ref = 2 * kPi * (0.5 * kin - 0.25 * quart);
  EXPECT_NEAR(cylinder_energy(u, 2.0, Power(2)), ref, 1e-10 * std::abs(ref));
  EXPECT_NEAR(cylinder_energy(u, 2.0, Power(2)), energy(u, Power(2)), 1e-12 * std::abs(ref));
}

TEST(Classify, ZeroFieldIsNone) {
  const SetLabel s = classify(Field::zeros(Grid2D(16, 16, 5.0, 5.0)), Power(2), 1.0, 2.0);
  EXPECT_EQ(s.label, SetLabel::Kind::None);
  EXPECT_TRUE(s.below_phi_mass);
  EXPECT_TRUE(s.l1_below_d1);
}

TEST(Classify, LabelMatchesPredicates) {
  FunctionalReport r;
  r.mass = 1.0;
  r.L1 = 0.2;
  r.I = -0.1;
  r.K = 0.3;
  EXPECT_EQ(classify(r, 0.5, 2.0).label, SetLabel::Kind::InJ);
  r.K = 0.0;
  EXPECT_EQ(classify(r, 0.5, 2.0).label, SetLabel::Kind::InD);
  r.L1 = -0.2;
  r.Q = -0.4;
  r.K = -1.0;
  EXPECT_EQ(classify(r, 0.5, 2.0).label, SetLabel::Kind::InQminus);
  r.L1 = 0.7;
  r.I = 0.1;
  EXPECT_EQ(classify(r, 0.5, 2.0).label, SetLabel::Kind::Subthreshold);
  r.mass = 3.0;
  EXPECT_EQ(classify(r, 0.5, 2.0).label, SetLabel::Kind::None);
  r.L1 = 0.5;
  r.I = 1e-9;
  EXPECT_EQ(classify(r, 0.5, 2.0).label, SetLabel::Kind::GroundStateBoundary);
}

TEST(AnisotropicRatio, ScaleInvariant) {
  std::mt19937_64 rng(8);
  const Field u = kp5::testing::random_localized_field(Grid2D(64, 64, 40.0, 40.0), rng);
  const double r = anisotropic_ratio(u, 10.0);
  for (double a : {-2.0, 0.1, 7.0}) EXPECT_NEAR(anisotropic_ratio(u.scaled(a), 10.0), r, 1e-12 * r);
}

TEST(AnisotropicRatio, WindowedProductIsConsistentAcrossResolutions) {
  auto f = [](double x, double y) { return std::sin(x) * std::sin(y) * std::exp(-(x * x + y * y) / 50.0); };
  const double phi_mass = 30.8459;
  const double r1 = anisotropic_ratio(inverse(project_zero_x_mean(forward(Field::sample(Grid2D(128, 128, 80.0, 80.0), f)))), phi_mass);
  const double r2 = anisotropic_ratio(inverse(project_zero_x_mean(forward(Field::sample(Grid2D(256, 256, 80.0, 80.0), f)))), phi_mass);
  EXPECT_GT(r1, 0.0);
  EXPECT_LT(r1, 1.0);
  EXPECT_NEAR(r1, r2, 1e-6);
}

TEST(AnisotropicRatio, DegenerateFieldRejected) {
  const Grid2D g(32, 32, 2 * kPi, 2 * kPi);
  const Field xonly = Field::sample(g, [](double x, double) { return std::sin(x); });
  EXPECT_THROW(anisotropic_ratio(xonly, 1.0), Error);
}

TEST(ScaleTransform, UnitParameterIsIdentity) {
  std::mt19937_64 rng(9);
  const Field u = kp5::testing::random_localized_field(Grid2D(128, 128, 40.0, 40.0), rng);
  for (auto fam : {ScaleFamily::critical(1.0), ScaleFamily::ysqueeze(1.0), ScaleFamily::blowup(1.0),
                   ScaleFamily::instability(0.0)}) {
    const Field v = scale_transform(u, fam, Rational(2));
    EXPECT_LE(kp5::testing::max_abs_diff(v.values(), u.values()), 1e-12 * u.max_abs());
  }
}

TEST(ScaleTransform, CriticalScalingPreservesMass) {
  std::mt19937_64 rng(10);
  const Field u = kp5::testing::random_localized_field(Grid2D(256, 256, 40.0, 40.0), rng);
  for (double l : {0.9, 0.95, 1.05, 1.2}) {
    const Field v = scale_transform(u, ScaleFamily::critical(l), Rational(2));
    EXPECT_NEAR(mass(v), mass(u), 1e-8 * mass(u)) << l;
  }
}

TEST(ScaleTransform, YSqueezePreservesTransverseNorm) {
  std::mt19937_64 rng(11);
  const Field u = kp5::testing::random_localized_field(Grid2D(128, 256, 40.0, 40.0), rng);
  const double b = functional_report(u, Power(2)).dxinvdy_norm2;
  for (double l : {0.8, 0.9, 1.1}) {
    const double bl = functional_report(scale_transform(u, ScaleFamily::ysqueeze(l)), Power(2)).dxinvdy_norm2;
    EXPECT_NEAR(bl, b, 1e-8 * b) << l;
  }
}

TEST(ScaleTransform, DilationOfWideFieldLosesLocalization) {
  const Grid2D g(64, 64, 20.0, 20.0);
  const Field u = kp5::testing::dipole(g, 6.0, 6.0);
  try {
    scale_transform(u, ScaleFamily::critical(0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LocalizationLost);
  }
}

TEST(ScaleTransform, RejectsBadParameters) {
  const Field u = kp5::testing::dipole(Grid2D(32, 32, 20.0, 20.0), 2.0, 2.0);
  EXPECT_THROW(scale_transform(u, ScaleFamily::critical(0.0)), Error);
  EXPECT_THROW(scale_transform(u, ScaleFamily::instability(0.2)), Error);
}

TEST(ScalingAlgebra, YSqueezeGapOnKZeroFields) {
  std::mt19937_64 rng(12);
  const Grid2D g(128, 256, 40.0, 60.0);
  for (int trial = 0; trial < 2; ++trial) {
    const Field u = k_zero(kp5::testing::random_localized_field(g, rng));
    const FunctionalReport r = functional_report(u, Power(2));
    ASSERT_LT(std::abs(r.K), 1e-8 * r.mass);
    for (double l : {0.5, 0.8, 0.9}) {
      const FunctionalReport rl = functional_report(scale_transform(u, ScaleFamily::ysqueeze(l)), Power(2));
      const double expected = ysqueeze_gap_factor(l, Rational(2)) * (r.mass + r.dxx_norm2);
      EXPECT_NEAR(r.L1 - rl.L1, expected, 1e-6 * std::abs(expected)) << l;
    }
  }
}

TEST(ScalingAlgebra, YSqueezeLimitOfI) {
  // Strong transverse compression needs a tall, finely sampled box.
  const Grid2D g(64, 2048, 40.0, 768.0);
  const Field u = kp5::testing::dipole(g, 2.5, 64.0, 0.3);
  const FunctionalReport r = functional_report(u, Power(2));
  const double b = r.dxinvdy_norm2;
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double l : {0.5, 0.25, 0.125}) {
    const double il = functional_report(scale_transform(u, ScaleFamily::ysqueeze(l)), Power(2)).I;
    const double gap = std::abs(il - b);
    const double predicted = std::pow(l, 4) * (r.mass + r.dxx_norm2) - std::pow(l, 6) * r.potential;
    EXPECT_LT(gap, prev_gap) << l;
    EXPECT_NEAR(il - b, predicted, 1e-6 * predicted) << l;
    prev_gap = gap;
  }
}

TEST(WeylHeisenberg, MassBoundedByMomentAndTransverseDerivative) {
  std::mt19937_64 rng(13);
  const Grid2D g(64, 64, 40.0, 40.0);
  for (int trial = 0; trial < 20; ++trial) {
    const FunctionalReport r = functional_report(kp5::testing::random_localized_field(g, rng), Power(2));
    EXPECT_LE(r.mass, 2.0 * std::sqrt(r.J) * r.dy_norm * (1 + 1e-12));
  }
}

TEST(Csv, FixedColumnOrder) {
  EXPECT_EQ(csv_header(), "t,mass,energy,L1,I,K,Q,J,es_norm2,dy_norm,l4_norm4");
  FunctionalReport r;
  r.mass = 1.5;
  const std::string row = csv_row(0.25, r);
  EXPECT_EQ(row.substr(0, 9), "0.25,1.5,");
}
