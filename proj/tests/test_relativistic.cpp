#include <gtest/gtest.h>

#include <cmath>

#include "gql/relativistic.hpp"
#include "gql/verify.hpp"

using namespace gql;
using V = std::vector<double>;

TEST(Rhd, RestStatePressure) {
  auto [p, rep] = rhd::pressure({1, 0, 2.5});
  EXPECT_NEAR(p, 1.0, 1e-14);
}

TEST(Rhd, MovingStateRecovery) {
  rhd::State u{1.25, 3.28125, 4.46875};
  auto w = rhd::to_primitive(u);
  EXPECT_NEAR(w.p, 1.0, 1e-12);
  EXPECT_NEAR(w.v, 0.6, 1e-12);
  EXPECT_NEAR(w.rho, 1.0, 1e-12);
  auto f = rhd::flux(u);
  EXPECT_NEAR(f[0], 0.75, 1e-12);
  EXPECT_NEAR(f[1], 2.96875, 1e-12);
  EXPECT_NEAR(f[2], 3.28125, 1e-12);
  auto rep = rhd::gql();
  const auto& c = rep.constraints().back();
  EXPECT_NEAR(c.phi(V(u.begin(), u.end()), c.minimizer(V(u.begin(), u.end()))), 0.95746, 1e-5);
}

TEST(Rhd, ToConservedMatchesExample) {
  auto u = rhd::to_conserved({1.0, 0.6, 1.0});
  EXPECT_NEAR(u[0], 1.25, 1e-14);
  EXPECT_NEAR(u[1], 3.28125, 1e-14);
  EXPECT_NEAR(u[2], 4.46875, 1e-14);
}

TEST(Rhd, InadmissibleStateRejected) {
  EXPECT_THROW(rhd::pressure({1, 2, 2}), DomainError);
  EXPECT_THROW(rhd::pressure({-1, 0, 2}), DomainError);
}

// The stored conserved state can already hide digits of p, so the solver is
// judged by backward error: re-conserving must reproduce u.
TEST(Rhd, RecoveryIsBackwardStable) {
  verify::Rng r(31);
  for (int k = 0; k < 2000; ++k) {
    rhd::Primitive w{r.log_uniform(1e-3, 1e3), r.uniform(-0.999, 0.999), r.log_uniform(1e-3, 1e3)};
    auto u = rhd::to_conserved(w);
    ASSERT_TRUE(rhd::admissible(u));
    auto back = rhd::to_primitive(u);
    EXPECT_GT(back.p, 0.0);
    auto again = rhd::to_conserved(back);
    for (int i = 0; i < 3; ++i) EXPECT_LE(std::abs(again[i] - u[i]), 1e-12 * std::abs(u[2]));
  }
}

TEST(Rhd, RecoveryForwardErrorOnModerateStates) {
  verify::Rng r(36);
  for (int k = 0; k < 2000; ++k) {
    rhd::Primitive w{r.log_uniform(0.1, 10), r.uniform(-0.99, 0.99), r.log_uniform(0.1, 10)};
    auto back = rhd::to_primitive(rhd::to_conserved(w));
    EXPECT_LE(std::abs(back.p - w.p) / w.p, 1e-12);
  }
}

TEST(Rhd, FunctionalMinimumIsEnergyBound) {
  verify::Rng r(32);
  auto rep = rhd::gql();
  const auto& c = rep.constraints().back();
  for (int k = 0; k < 1000; ++k) {
    V u{r.log_uniform(0.1, 10), r.uniform(-10, 10), 0.0};
    u[2] = std::hypot(u[0], u[1]) + r.uniform(-1, 1);
    double g = rhd::g(rhd::as_state(u));
    EXPECT_NEAR(c.phi(u, c.minimizer(u)), g, 1e-12 * verify::state_scale(u));
    EXPECT_GE(rhd::phi(u, r.uniform(-1, 1)), g - 1e-12 * verify::state_scale(u));
  }
}

TEST(RhdEntropy, BoundaryStatesAreZero) {
  verify::Rng r(33);
  for (int k = 0; k < 1000; ++k) {
    double rho = r.log_uniform(0.1, 10), v = r.uniform(-0.9, 0.9), s = r.uniform(0.1, 2);
    auto b = rhd::entropy_boundary_state(rho, v, s, 5.0 / 3.0);
    EXPECT_LE(std::abs(rhd::entropy_phi(V(b.begin(), b.end()), rho, v, s, 5.0 / 3.0)),
              1e-12 * verify::state_scale(V(b.begin(), b.end())));
  }
}

TEST(Rmhd, RestFrameRecoveryFunctionRoot) {
  auto u = rmhd::to_conserved({1.0, {0, 0, 0}, {0, 0, 0}, 1.0});
  auto [phi, rep] = rmhd::phi_hat(u);
  EXPECT_NEAR(phi, 3.5, 1e-12);
}

TEST(Rmhd, PrimitiveRoundTrip) {
  rmhd::Primitive w{1.0, {0.1, 0, 0}, {0.5, 0, 0}, 0.1};
  auto back = rmhd::to_primitive(rmhd::to_conserved(w));
  EXPECT_NEAR(back.rho, 1.0, 1e-10);
  EXPECT_NEAR(back.p, 0.1, 1e-10);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(back.v[i], w.v[i], 1e-10);
    EXPECT_DOUBLE_EQ(back.B[i], w.B[i]);
  }
}

TEST(Rmhd, ProbeAtRest) {
  V u{1, 0, 0, 0, 0, 0, 0, 2.5};
  auto rep = rmhd::gql();
  const auto& c = rep.constraints().back();
  EXPECT_NEAR(c.phi(u, c.minimizer(u)), 1.5, 1e-15);
  EXPECT_EQ(contains_gql(rep, u, AuxSample(64, 1)), Membership::Undecided);
}

TEST(Rmhd, BoundaryStatesHaveZeroFunctional) {
  verify::Rng r(34);
  for (int k = 0; k < 1000; ++k) {
    double rho = r.log_uniform(0.1, 10);
    Vec3 vs = r.ball(0.95), bs = r.box(5.0);
    auto b = rmhd::boundary_state(rho, vs, bs);
    V u(b.begin(), b.end());
    EXPECT_LE(std::abs(rmhd::phi(u, vs, bs)), 1e-12 * verify::state_scale(u));
  }
}

TEST(Rmhd, FunctionalPositiveOnAdmissibleStates) {
  verify::Rng r(35);
  for (int k = 0; k < 300; ++k) {
    V u = verify::rmhd_sample(r);
    for (int j = 0; j < 30; ++j) EXPECT_GT(rmhd::phi(u, r.ball(1.0), r.box(50.0)), 0.0);
  }
}
