#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fracks/kernel_oracle.hpp"

using namespace fracks;

// Reference values below come from an independent high-precision computation
// (Bessel series for exp(cos x) and closed-form integrals), not from this code.
namespace {

// Lambda^alpha exp(cos x) at x = 0, i.e. 2 sum_k k^alpha I_k(1).
constexpr double kExpCosLambdaHalf = 1.60334600903969940;
constexpr double kExpCosLambdaOne = 1.83122498174449336;
constexpr double kExpCosLambdaThreeHalves = 2.17919313340346145;

// Gagliardo W^{1/2,2} seminorm of cos x: sqrt(4 pi int_0^pi (1 - cos h) / h^2 dh).
constexpr double kCosGagliardoHalfTwo = 3.90795692781732422;

Field expcos(const TorusGrid& g) {
  return Field::sample(g, [](double x) { return std::exp(std::cos(x)); });
}

}  // namespace

TEST(FractionalConstant, KnownValues) {
  EXPECT_NEAR(fractional_constant(1.0), 1.0 / kPi, 1e-15);
  // c_alpha -> 0 as alpha -> 0 or 2
  EXPECT_LT(fractional_constant(1e-6), 1e-5);
  EXPECT_LT(fractional_constant(2.0 - 1e-6), 1e-5);
}

TEST(LambdaAlphaPoint, ConstantGivesZero) {
  const TorusGrid g(64);
  const auto v = lambda_alpha_point(Field::constant(g, 3.0), 0.7, 10);
  EXPECT_LE(std::abs(v.value), std::max(v.tolerance, 1e-12));
}

TEST(LambdaAlphaPoint, SingleModeMatchesSymbol) {
  const TorusGrid g(64);
  const Field f = Field::sample(g, [](double x) { return std::cos(3 * x); });
  const auto v = lambda_alpha_point(f, 1.0, 32);
  EXPECT_LE(std::abs(v.value - 3.0) / 3.0, 1e-3);
}

TEST(LambdaAlphaPoint, ExpCosAgainstBesselSeries) {
  const TorusGrid g(256);
  const Field f = expcos(g);
  const QuadratureSpec q{4, 200, 1.0};
  const std::pair<double, double> cases[] = {
      {0.5, kExpCosLambdaHalf}, {1.0, kExpCosLambdaOne}, {1.5, kExpCosLambdaThreeHalves}};
  for (auto [alpha, expect] : cases) {
    const auto v = lambda_alpha_point(f, alpha, 128, q);
    EXPECT_NEAR(v.value, expect, 1e-6) << "alpha=" << alpha;
    EXPECT_LE(v.tolerance, 1e-5);
  }
}

TEST(LambdaAlphaPoint, RefinementsAgree) {
  const TorusGrid g(256);
  const Field f = expcos(g);
  const auto coarse = lambda_alpha_point(f, 0.5, 128, QuadratureSpec{4, 200, 1.0});
  const auto fine = lambda_alpha_point(f, 0.5, 128, QuadratureSpec{8, 400, 1.0});
  EXPECT_NEAR(coarse.value, fine.value, 1e-6);
}

TEST(LambdaAlphaField, MatchesSpectralOnRandomBandLimited) {
  const TorusGrid g(64);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal;
  double a[7], b[7];
  for (int k = 0; k < 7; ++k) a[k] = normal(rng), b[k] = normal(rng);
  const Field f = Field::sample(g, [&](double x) {
    double v = 0;
    for (int k = 0; k < 7; ++k) v += (a[k] * std::cos(k * x) + b[k] * std::sin(k * x)) / (1 + k);
    return v;
  });
  for (double alpha : {0.3, 1.0, 1.7}) {
    const Field spectral = fractional_laplacian(f, alpha);
    const auto oracle = lambda_alpha_field(f, alpha);
    double scale = 0.0, worst = 0.0;
    for (int j = 0; j < f.size(); ++j) {
      scale = std::max(scale, std::abs(oracle[j].value));
      worst = std::max(worst, std::abs(oracle[j].value - spectral[j]));
    }
    EXPECT_LE(worst / scale, 1e-3) << "alpha=" << alpha;
  }
}

TEST(LambdaAlphaPoint, OrderOutsideOpenIntervalThrows) {
  const Field f = Field::constant(TorusGrid(32), 1.0);
  EXPECT_THROW(lambda_alpha_point(f, 0.0, 0), DomainError);
  EXPECT_THROW(lambda_alpha_point(f, 2.0, 0), DomainError);
  EXPECT_THROW(dissipation_I(f, -1.0, 0), DomainError);
}

TEST(QuadratureSpec, Validation) {
  EXPECT_THROW((QuadratureSpec{1, 64, 1.0}.validate()), DomainError);
  EXPECT_THROW((QuadratureSpec{4, 8, 1.0}.validate()), DomainError);
  EXPECT_THROW((QuadratureSpec{4, 64, 0.0}.validate()), DomainError);
  EXPECT_NO_THROW(QuadratureSpec{}.validate());
}

TEST(HilbertPoint, KnownPairAndConstants) {
  const TorusGrid g(256);
  const Field c = Field::sample(g, [](double x) { return std::cos(x); });
  const auto at_half_pi = hilbert_point(c, 192);  // x = pi/2
  EXPECT_NEAR(at_half_pi.value, 1.0, 1e-6);
  const auto flat = hilbert_point(Field::constant(g, 2.0), 17);
  EXPECT_NEAR(flat.value, 0.0, 1e-12);
}

TEST(HilbertPoint, AgreesWithSpectralOnRandomField) {
  const TorusGrid g(64);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  double a[9], b[9];
  for (int k = 0; k < 9; ++k) a[k] = normal(rng), b[k] = normal(rng);
  const Field f = Field::sample(g, [&](double x) {
    double v = 0;
    for (int k = 0; k < 9; ++k) v += a[k] * std::cos(k * x) + b[k] * std::sin(k * x);
    return v;
  });
  const Field h = hilbert(f);
  double worst = 0.0;
  for (int j = 0; j < g.n(); ++j) worst = std::max(worst, std::abs(hilbert_point(f, j).value - h[j]));
  EXPECT_LE(worst, 1e-4);
}

TEST(DissipationI, NonnegativeAndZeroOnConstants) {
  const TorusGrid g(64);
  const auto flat = dissipation_I_field(Field::constant(g, 4.0), 0.8);
  for (const auto& v : flat) EXPECT_NEAR(v.value, 0.0, 1e-12);
  const Field f = Field::sample(g, [](double x) { return std::sin(2 * x) + 0.3 * std::cos(5 * x); });
  for (double alpha : {0.5, 1.0, 1.5})
    for (const auto& v : dissipation_I_field(f, alpha)) EXPECT_GE(v.value, -v.tolerance);
}

TEST(DissipationI, SingleModeClosedForm) {
  // I(cos) = 2 cos Lambda^a cos - Lambda^a cos^2 = 2 cos^2 - 2^a cos(2x)/2 for alpha = a.
  const TorusGrid g(64);
  const Field f = Field::sample(g, [](double x) { return std::cos(x); });
  const double alpha = 1.0;
  const auto I = dissipation_I_field(f, alpha);
  for (int j = 0; j < g.n(); j += 7) {
    const double x = g.x(j);
    const double expect = 2.0 * std::cos(x) * std::cos(x) - std::pow(2.0, alpha) * std::cos(2 * x) / 2.0;
    EXPECT_NEAR(I[j].value, expect, 1e-3 * (1 + std::abs(expect))) << "j=" << j;
  }
}

TEST(Gagliardo, ConstantsAndClosedForm) {
  EXPECT_EQ(gagliardo_seminorm(Field::constant(TorusGrid(64), 2.0), 0.5, 2.0), 0.0);
  const TorusGrid g(256);
  const Field c = Field::sample(g, [](double x) { return std::cos(x); });
  EXPECT_NEAR(gagliardo_seminorm(c, 0.5, 2.0) / kCosGagliardoHalfTwo, 1.0, 1e-4);
  const double coarse = gagliardo_seminorm(Field::sample(TorusGrid(128), [](double x) { return std::cos(x); }), 0.5, 2.0);
  EXPECT_NEAR(coarse / kCosGagliardoHalfTwo, 1.0, 1e-4);
}

TEST(Gagliardo, ComparableToSpectralSeminorm) {
  // For p = 2 the Gagliardo and Fourier seminorms are equivalent; on cos x the
  // Fourier one is sqrt(pi).
  const TorusGrid g(128);
  const double v = gagliardo_seminorm(Field::sample(g, [](double x) { return std::cos(x); }), 0.5, 2.0);
  EXPECT_GT(v / std::sqrt(kPi), 0.5);
  EXPECT_LT(v / std::sqrt(kPi), 5.0);
}

TEST(Gagliardo, DomainErrors) {
  const Field f = Field::constant(TorusGrid(16), 1.0);
  EXPECT_THROW(gagliardo_seminorm(f, 0.0, 2.0), DomainError);
  EXPECT_THROW(gagliardo_seminorm(f, 1.0, 2.0), DomainError);
  EXPECT_THROW(gagliardo_seminorm(f, 0.5, 0.5), DomainError);
}

TEST(Gagliardo, TranslationInvariant) {
  const TorusGrid g(64);
  const Field f = Field::sample(g, [](double x) { return std::exp(std::sin(x)); });
  EXPECT_NEAR(gagliardo_seminorm(f, 0.3, 1.5), gagliardo_seminorm(f.rotated(13), 0.3, 1.5), 1e-12);
}
