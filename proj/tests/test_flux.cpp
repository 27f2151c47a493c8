#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gql/flux.hpp"
#include "gql/gasdyn.hpp"
#include "gql/verify.hpp"

using namespace gql;
using gasdyn::State;
using Half = kinetic::Side;

namespace {

auto euler_flux = [](const State& u) { return gasdyn::flux(u); };

long double erfc_series(long double x) {
  long double term = x, sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x * x / n;
    sum += term / (2 * n + 1);
  }
  return 1.0L - 2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum;
}

// Lentz-free bottom-up evaluation of the Laplace continued fraction.
long double erfc_cf(long double x) {
  long double t = x;
  for (int k = 50; k >= 1; --k) t = x + (k / 2.0L) / t;
  return std::exp(-x * x) / std::sqrt(std::numbers::pi_v<long double>) / t;
}

long double erfc_reference(double x) {
  if (std::abs(x) <= 3.0) return erfc_series(x);
  return x > 0 ? erfc_cf(x) : 2.0L - erfc_cf(-x);
}

}  // namespace

TEST(Lf, EulerExample) {
  auto f = lf_flux<3>({1, 0, 1}, {1, 0, 2}, euler_flux, 2.0);
  EXPECT_NEAR(f[0], 0.0, 1e-15);
  EXPECT_NEAR(f[1], 0.6, 1e-15);
  EXPECT_NEAR(f[2], -1.0, 1e-15);
}

TEST(Lf, ConsistencyAndSymmetricViscosity) {
  verify::Rng r(51);
  for (int k = 0; k < 100; ++k) {
    auto a = gasdyn::as_state(verify::euler_sample(r));
    auto b = gasdyn::as_state(verify::euler_sample(r));
    double al = r.uniform(0.1, 50);
    auto fa = gasdyn::flux(a), fb = gasdyn::flux(b);
    EXPECT_EQ(lf_flux<3>(a, a, euler_flux, al), fa);
    auto ab = lf_flux<3>(a, b, euler_flux, al), ba = lf_flux<3>(b, a, euler_flux, al);
    for (int i = 0; i < 3; ++i)
      EXPECT_NEAR(ab[i] + ba[i], fa[i] + fb[i], 1e-13 * (std::abs(fa[i]) + std::abs(fb[i]) + 1));
  }
}

TEST(Erfc, MatchesSeriesAndContinuedFraction) {
  for (int k = 0; k <= 4000; ++k) {
    double x = -10.0 + 20.0 * k / 4000.0;
    long double ref = erfc_reference(x);
    EXPECT_LE(std::abs((gql::erfc(x) - ref) / ref), 1e-12L) << x;
  }
}

TEST(Kinetic, HalfFluxAtRest) {
  State u = gasdyn::from_primitive(1.0, 0.0, 0.5);
  auto fp = kinetic::half_flux(u, Half::Plus), fm = kinetic::half_flux(u, Half::Minus);
  EXPECT_NEAR(fp[0], 0.5 / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_NEAR(fp[0], 0.28209, 1e-5);
  EXPECT_DOUBLE_EQ(fp[0], -fm[0]);
}

TEST(Kinetic, HalfFluxesSumToEulerFlux) {
  verify::Rng r(52);
  for (int k = 0; k < 10000; ++k) {
    State u = gasdyn::as_state(verify::euler_sample(r));
    auto fp = kinetic::half_flux(u, Half::Plus), fm = kinetic::half_flux(u, Half::Minus);
    auto f = gasdyn::flux(u);
    double scale = std::abs(f[0]) + std::abs(f[1]) + std::abs(f[2]);
    for (int i = 0; i < 3; ++i) ASSERT_LE(std::abs(fp[i] + fm[i] - f[i]), 1e-12 * scale);
  }
}

TEST(Kinetic, ConsistencyExample) {
  auto f = kinetic::flux({1, 0, 1}, {1, 0, 1});
  EXPECT_NEAR(f[0], 0.0, 1e-12);
  EXPECT_NEAR(f[1], 0.4, 1e-12);
  EXPECT_NEAR(f[2], 0.0, 1e-12);
}

TEST(Kinetic, ColdUpwindStateContributesNothing) {
  double prev = 1.0;
  for (double p : {1e-2, 1e-4, 1e-6, 1e-8}) {
    auto fm = kinetic::half_flux(gasdyn::from_primitive(1.0, 1.0, p), Half::Minus);
    double mag = std::abs(fm[0]) + std::abs(fm[1]) + std::abs(fm[2]);
    EXPECT_LE(mag, prev);
    prev = mag;
  }
  EXPECT_LT(prev, 1e-300);
}

TEST(Kinetic, HalfFluxSigns) {
  verify::Rng r(53);
  for (int k = 0; k < 10000; ++k) {
    State u = gasdyn::from_primitive(r.log_uniform(0.1, 10), r.uniform(-3, 3), r.log_uniform(0.1, 10));
    ASSERT_GT(kinetic::half_flux(u, Half::Plus)[0], 0.0);
    ASSERT_LT(kinetic::half_flux(u, Half::Minus)[0], 0.0);
  }
}

TEST(Kinetic, Errors) {
  EXPECT_THROW(kinetic::half_flux({1, 0, 1}, Half::Plus, 3.5), UsageError);
  EXPECT_THROW(kinetic::half_flux({1, 0, 0}, Half::Plus), DomainError);
  EXPECT_THROW(kinetic::half_flux({-1, 0, 1}, Half::Minus), DomainError);
}
