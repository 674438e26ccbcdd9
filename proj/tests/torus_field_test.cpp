#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fracks/torus_field.hpp"

using namespace fracks;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
  double d = 0.0;
  for (int j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

Field random_field(const TorusGrid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(static_cast<std::size_t>(g.n()));
  for (auto& x : v) x = normal(rng);
  return Field(g, v);
}

}  // namespace

TEST(TorusGrid, RejectsOddOrTinySizes) {
  EXPECT_THROW(TorusGrid(7), DomainError);
  EXPECT_THROW(TorusGrid(6), DomainError);
  EXPECT_THROW(TorusGrid(0), DomainError);
  EXPECT_NO_THROW(TorusGrid(8));
}

TEST(TorusGrid, StartsAtMinusPi) {
  const TorusGrid g(16);
  EXPECT_DOUBLE_EQ(g.x(0), -kPi);
  EXPECT_NEAR(g.x(8), 0.0, 1e-15);
  EXPECT_EQ(g.wavenumber(9), -7);
  EXPECT_EQ(g.slot(-1), 15);
  EXPECT_EQ(g.wavenumber(8), 8);
}

TEST(Field, SizeMismatchThrows) {
  EXPECT_THROW(Field(TorusGrid(8), std::vector<double>(9)), DomainError);
}

TEST(Spectrum, ConstantHasOnlyMeanMode) {
  const TorusGrid g(32);
  const auto s = to_spectrum(Field::constant(g, 2.5));
  EXPECT_NEAR(s.coefficient(0).real(), 2.5 * 32, 1e-12);
  for (int k = 1; k <= 16; ++k) EXPECT_LT(std::abs(s.coefficient(k)), 1e-12) << "k=" << k;
}

TEST(Spectrum, PureModeOccupiesPlusMinusK) {
  const TorusGrid g(32);
  const auto s = to_spectrum(Field::sample(g, [](double x) { return std::cos(3 * x); }));
  for (int j = 0; j < g.n(); ++j) {
    const int k = g.wavenumber(j);
    const double mag = std::abs(s.coefficients()[static_cast<std::size_t>(j)]);
    if (std::abs(k) == 3)
      EXPECT_NEAR(mag, 16.0, 1e-12);
    else
      EXPECT_LT(mag, 1e-12) << "k=" << k;
  }
  // x-referenced phase: cos(3x) has a real positive coefficient.
  EXPECT_NEAR(s.coefficient(3).imag(), 0.0, 1e-12);
  EXPECT_GT(s.coefficient(3).real(), 0.0);
}

TEST(Spectrum, RoundTripRandom) {
  for (int n : {8, 64, 250, 1024}) {
    const TorusGrid g(n);
    const Field f = random_field(g, static_cast<unsigned>(n));
    const Field back = from_spectrum(to_spectrum(f));
    double sup = 0.0;
    for (double v : f.values()) sup = std::max(sup, std::abs(v));
    EXPECT_LE(max_abs_diff(f, back) / sup, 1e-12) << "n=" << n;
  }
}

TEST(Spectrum, ZeroAndMeanOnly) {
  const TorusGrid g(16);
  const Field z = from_spectrum(Spectrum::zero(g));
  for (double v : z.values()) EXPECT_EQ(v, 0.0);
  const Field c = from_spectrum(Spectrum::zero(g).with(0, Complex(48.0, 0.0)));
  for (double v : c.values()) EXPECT_NEAR(v, 3.0, 1e-14);
}

TEST(Spectrum, InverseOfCosineSpectrum) {
  const TorusGrid g(64);
  const Field f = Field::sample(g, [](double x) { return std::cos(5 * x); });
  EXPECT_LE(max_abs_diff(from_spectrum(to_spectrum(f)), f), 1e-12);
}

TEST(Spectrum, AsymmetricSpectrumThrows) {
  const TorusGrid g(16);
  const auto s = Spectrum::zero(g).with(2, Complex(1.0, 0.0));
  EXPECT_THROW(from_spectrum(s), SymmetryError);
  EXPECT_THROW(from_spectrum(Spectrum::zero(g).with(0, Complex(0.0, 1.0))), SymmetryError);
}

TEST(Spectrum, NonFiniteInputNamesIndex) {
  const TorusGrid g(16);
  std::vector<double> v(16, 1.0);
  v[5] = std::nan("");
  try {
    to_spectrum(Field(g, v));
    FAIL() << "expected NonFiniteError";
  } catch (const NonFiniteError& e) {
    EXPECT_EQ(e.index(), 5u);
  }
}

TEST(Spectrum, Parseval) {
  const TorusGrid g(128);
  const Field f = random_field(g, 3);
  double physical = 0.0;
  for (double v : f.values()) physical += v * v;
  physical *= g.dx();
  double spectral = 0.0;
  const Spectrum s = to_spectrum(f);
  for (const Complex& c : s.coefficients()) spectral += std::norm(c);
  spectral *= kTwoPi / (static_cast<double>(g.n()) * g.n());
  EXPECT_NEAR(spectral / physical, 1.0, 1e-12);
}

TEST(Spectrum, MeanIsZeroModeOverN) {
  const TorusGrid g(64);
  const Field f = random_field(g, 11);
  EXPECT_NEAR(mean(f), to_spectrum(f).coefficient(0).real() / g.n(), 1e-14);
}

TEST(Mean, Examples) {
  const TorusGrid g(64);
  EXPECT_DOUBLE_EQ(mean(Field::constant(g, 4.25)), 4.25);
  for (int k = 1; k < 10; ++k)
    EXPECT_NEAR(mean(Field::sample(g, [k](double x) { return std::cos(k * x); })), 0.0, 1e-14);
  EXPECT_NEAR(mean(Field::sample(g, [](double x) { return 1.0 + 0.5 * std::cos(x); })), 1.0, 1e-15);
  EXPECT_NEAR(integral(Field::constant(g, 1.0)), kTwoPi, 1e-14);
}

TEST(Extrema, Examples) {
  const TorusGrid g(16);
  const auto z = extrema(Field::constant(g, 0.0));
  EXPECT_EQ(z.min, 0.0);
  EXPECT_EQ(z.max, 0.0);
  EXPECT_EQ(z.argmin, 0u);
  EXPECT_EQ(z.argmax, 0u);

  const auto c = extrema(Field::sample(g, [](double x) { return std::cos(x); }));
  EXPECT_DOUBLE_EQ(c.max, 1.0);
  EXPECT_EQ(c.argmax, 8u);

  const auto s = extrema(Field::sample(g, [](double x) { return std::sin(x); }));
  EXPECT_NEAR(s.min, -1.0, 1e-15);
  EXPECT_NEAR(g.x(static_cast<int>(s.argmin)), -kPi / 2, 1e-15);
  EXPECT_NEAR(s.max, 1.0, 1e-15);
  EXPECT_NEAR(g.x(static_cast<int>(s.argmax)), kPi / 2, 1e-15);
}

TEST(Field, RotationShiftsSamples) {
  const TorusGrid g(16);
  const Field f = Field::sample(g, [](double x) { return x; });
  const Field r = f.rotated(3);
  EXPECT_DOUBLE_EQ(r[0], f[3]);
  EXPECT_DOUBLE_EQ(r[15], f[2]);
  EXPECT_DOUBLE_EQ(f.rotated(-1)[0], f[15]);
}
