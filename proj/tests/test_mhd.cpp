#include <gtest/gtest.h>

#include <cmath>

#include "gql/experiments.hpp"
#include "gql/mhd.hpp"
#include "gql/verify.hpp"

using namespace gql;
using V = std::vector<double>;
using L2 = mmhd::Layout<2>;

TEST(IdealMhd, FunctionalCompletesTheSquare) {
  verify::Rng r(41);
  for (int k = 0; k < 2000; ++k) {
    V u = verify::mhd_sample(r, r.log_uniform(1e-2, 1e2));
    Vec3 vs = r.box(8.0), bs = r.box(8.0);
    double rho = u[0], dv2 = 0.0, db2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      dv2 += std::pow(u[1 + i] / rho - vs[i], 2);
      db2 += std::pow(u[4 + i] - bs[i], 2);
    }
    double expect = ideal_mhd::g(u) + 0.5 * rho * dv2 + 0.5 * db2;
    EXPECT_NEAR(ideal_mhd::phi(u, vs.data(), bs.data()), expect, 1e-12 * (verify::state_scale(u) + expect));
  }
}

TEST(IdealMhd, BoundaryStatesAndNormals) {
  verify::Rng r(42);
  for (int k = 0; k < 500; ++k) {
    Vec3 vs = r.box(3.0), bs = r.box(3.0);
    auto b = ideal_mhd::boundary_state(r.log_uniform(0.1, 10), vs, bs);
    EXPECT_NEAR(ideal_mhd::g(b), 0.0, 1e-12 * std::abs(b[7]));
    auto n = ideal_mhd::normal(vs, bs);
    double dotp = 0.0;
    for (int i = 0; i < 8; ++i) dotp += b[i] * n[i];
    EXPECT_NEAR(dotp + 0.5 * norm2(bs), 0.0, 1e-12 * (1 + std::abs(b[7])));
  }
}

TEST(Mmhd, MixtureGammaOfEqualFractions) {
  EXPECT_NEAR(mmhd::mixture_gamma<2>({0.5, 0.5}, exp::blast_spec()), 1.60552, 1e-5);
  EXPECT_DOUBLE_EQ(mmhd::mixture_gamma<2>({1.0, 0.0}, exp::blast_spec()), 5.0 / 3.0);
}

TEST(Mmhd, BadMixtureIsUsageError) {
  mmhd::MixtureSpec<2> bad{{1.0, -1.0}, {1.4, 1.4}};
  EXPECT_THROW(mmhd::region<2>(bad), UsageError);
}

TEST(Mmhd, BlastInnerStateFlux) {
  const double b1 = 100.0 / std::sqrt(4.0 * std::numbers::pi);
  auto u = exp::mixture_state(1.0, 1000.0, 1.0, {0, 0, 0}, {b1, 0, 0}, exp::blast_spec());
  EXPECT_NEAR(mmhd::pressure<2>(u, exp::blast_spec()), 1000.0, 1e-10);
  auto f = mmhd::flux<2>(u, 0, exp::blast_spec());
  EXPECT_NEAR(f[L2::kMom], 1000.0 - 0.5 * b1 * b1, 1e-10);
  EXPECT_DOUBLE_EQ(f[L2::kRho], 0.0);
  EXPECT_DOUBLE_EQ(f[L2::kMag], 0.0);
}

TEST(Mmhd, PrimitiveRoundTrip) {
  verify::Rng r(43);
  auto spec = exp::blast_spec();
  for (int k = 0; k < 1000; ++k) {
    mmhd::Primitive<2> w;
    w.rho = r.log_uniform(0.1, 10);
    w.v = r.box(3.0);
    w.B = r.box(3.0);
    w.p = r.log_uniform(0.1, 10);
    double y = r.uniform(0, 1);
    w.Y = {y, 1 - y};
    auto back = mmhd::to_primitive<2>(mmhd::to_conserved<2>(w, spec), spec);
    EXPECT_NEAR(back.p / w.p, 1.0, 1e-11);
    EXPECT_NEAR(back.Y[0], y, 1e-14);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(back.v[i], w.v[i], 1e-13);
  }
}

TEST(Mmhd, SourceIdentity) {
  verify::Rng r(44);
  for (int k = 0; k < 2000; ++k) {
    auto uv = verify::mmhd_sample(r, r.uniform(0, 1), r.log_uniform(1e-2, 1e2));
    auto u = mmhd::as_state<2>(uv);
    Vec3 vs = r.box(5.0), bs = r.box(5.0);
    double b = r.uniform(-3, 3);
    auto s = mmhd::godunov_source<2>(u);
    mmhd::State<2> n{};
    n[L2::kRho] = 0.5 * norm2(vs);
    for (int i = 0; i < 3; ++i) n[L2::kMom + i] = -vs[i], n[L2::kMag + i] = -bs[i];
    n[L2::kEnergy] = 1.0;
    double sn = 0.0;
    for (int i = 0; i < L2::kVars; ++i) sn += s[i] * n[i];
    double rho = u[L2::kRho], rhs = 0.0;
    for (int i = 0; i < 3; ++i) rhs += (u[L2::kMom + i] / rho - vs[i]) * (u[L2::kMag + i] - bs[i]);
    EXPECT_NEAR(b * (dot(vs, bs) + sn), b * rhs, 1e-12 * 100 * (1 + std::abs(b)));
  }
}

TEST(Mmhd, WaveSpeedBoundsNormalVelocityPlusFast) {
  verify::Rng r(45);
  auto spec = verify::audit_mixture();
  for (int k = 0; k < 500; ++k) {
    auto a = mmhd::as_state<2>(verify::mmhd_sample(r, r.uniform(0, 1), r.log_uniform(0.1, 10)));
    auto b = mmhd::as_state<2>(verify::mmhd_sample(r, r.uniform(0, 1), r.log_uniform(0.1, 10)));
    for (int d = 0; d < 2; ++d) {
      double s = mmhd::wave_speed<2>(a, b, d, spec);
      EXPECT_GE(s, std::abs(a[L2::kMom + d] / a[L2::kRho]) + mmhd::fast_speed<2>(a, d, spec));
      EXPECT_GE(s, std::abs(b[L2::kMom + d] / b[L2::kRho]) + mmhd::fast_speed<2>(b, d, spec));
      EXPECT_DOUBLE_EQ(s, mmhd::wave_speed<2>(b, a, d, spec));
    }
  }
}

TEST(Mmhd, DirectAndGqlRegionsAgreeOnFractionViolators) {
  verify::Rng r(46);
  auto spec = verify::audit_mixture();
  auto rep = mmhd::gql<2>();
  for (int k = 0; k < 200; ++k) {
    auto u = verify::mmhd_sample(r, r.uniform(1.01, 1.5), 1.0);
    EXPECT_FALSE(contains_direct(mmhd::region<2>(spec), u));
    EXPECT_EQ(contains_gql(rep, u, AuxSample(8, k)), Membership::Out);
  }
}
