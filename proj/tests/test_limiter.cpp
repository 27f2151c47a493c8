#include <gtest/gtest.h>

#include <cmath>

#include "gql/dg/cell.hpp"
#include "gql/limiter.hpp"
#include "gql/verify.hpp"

using namespace gql;
using C2 = dg::Cell<2>;
using L2 = mmhd::Layout<2>;

namespace {

const dg::Tables& tables() {
  static const dg::Tables t;
  return t;
}

// Static cell with rho = 1, E = 1 and the given first x-mode on variable v,
// scaled so that the minimum over the limiter points hits `target`.
C2 linear_cell(int v, double mean, double target) {
  C2 c;
  c.c[L2::kRho][0] = 1.0;
  c.c[L2::kEnergy][0] = 1.0;
  c.c[0][0] = 0.5;
  c.c[v][0] = mean;
  c.c[v][1] = 1.0;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < tables().limiter.size(); ++p)
    lo = std::min(lo, dg::evaluate_var<2>(c, tables().limiter, p, v));
  c.c[v][1] = (mean - target) / (mean - lo);
  return c;
}

C2 random_cell(verify::Rng& r, double perturb) {
  auto spec = verify::audit_mixture();
  auto u = mmhd::as_state<2>(verify::mmhd_sample(r, r.uniform(0, 1), r.log_uniform(1e-2, 1e2)));
  (void)spec;
  C2 cell;
  for (int v = 0; v < L2::kVars; ++v) {
    if (!C2::is_scalar(v)) continue;
    cell.c[v][0] = u[v];
    for (int m = 1; m < dg::kModes; ++m) cell.c[v][m] = perturb * (std::abs(u[v]) + 0.1) * r.normal();
  }
  cell.d[0] = u[L2::kMag];
  cell.d[1] = u[L2::kMag + 1];
  for (int k = 2; k < dg::kMagModes; ++k) cell.d[k] = perturb * (1.0 + std::abs(u[L2::kMag])) * r.normal();
  return cell;
}

}  // namespace

TEST(Limiter, PointSetSize) {
  EXPECT_EQ(tables().limiter.size(), 17u);
}

TEST(Limiter, DensityThetaExample) {
  C2 c = linear_cell(L2::kRho, 1.0, -0.5);
  c.c[0][0] = 0.5, c.c[0][1] = 0.5 * c.c[L2::kRho][1];
  double th = limiter::scale_density<2>(c, tables().limiter);
  EXPECT_NEAR(th, (1.0 - 1e-13) / 1.5, 1e-12);
  EXPECT_NEAR(th, 0.6667, 1e-4);
  EXPECT_DOUBLE_EQ(c.c[L2::kRho][0], 1.0);
  EXPECT_GE(limiter::min_density<2>(c, tables().limiter), limiter::kFloor);
}

TEST(Limiter, DensityNoOpAndHardFailure) {
  C2 c = linear_cell(L2::kRho, 1.0, 0.5);
  auto before = c.c;
  EXPECT_EQ(limiter::scale_density<2>(c, tables().limiter), 1.0);
  EXPECT_EQ(c.c, before);
  C2 bad;
  bad.c[L2::kRho][0] = 1e-14;
  EXPECT_THROW(limiter::scale_density<2>(bad, tables().limiter), DomainError);
}

TEST(Limiter, FractionThetaExample) {
  // rhoY_1 dips to -0.1 while the blend target (rhoY_bar / rho_bar) rho is 0.4.
  C2 c = linear_cell(0, 0.4, -0.1);
  double th = limiter::scale_fractions<2>(c, tables().limiter);
  EXPECT_NEAR(th, 0.2, 1e-12);
  EXPECT_DOUBLE_EQ(c.c[0][0], 0.4);
  for (std::size_t p = 0; p < tables().limiter.size(); ++p)
    for (int k = 0; k < 2; ++k) EXPECT_GE(limiter::partial_density<2>(c, tables().limiter, p, k), 0.0);
}

TEST(Limiter, FractionsNoOp) {
  C2 c = linear_cell(0, 0.4, 0.1);
  auto before = c.c;
  EXPECT_EQ(limiter::scale_fractions<2>(c, tables().limiter), 0.0);
  EXPECT_EQ(c.c, before);
}

TEST(Limiter, EnergyThetaExample) {
  C2 c = linear_cell(L2::kEnergy, 1.0, -1.0);
  double th = limiter::scale_energy<2>(c, tables().limiter);
  EXPECT_NEAR(th, (1.0 - 1e-13) / 2.0, 1e-12);
  EXPECT_GE(limiter::min_g<2>(c, tables().limiter), limiter::kFloor);
  C2 ok = linear_cell(L2::kEnergy, 1.0, 0.5);
  EXPECT_EQ(limiter::scale_energy<2>(ok, tables().limiter), 1.0);
}

TEST(Limiter, InternalEnergyIsConcave) {
  verify::Rng r(71);
  for (int k = 0; k < 100000; ++k) {
    auto a = mmhd::as_state<2>(verify::mmhd_sample(r, r.uniform(0, 1), r.log_uniform(1e-2, 1e2)));
    auto b = mmhd::as_state<2>(verify::mmhd_sample(r, r.uniform(0, 1), r.log_uniform(1e-2, 1e2)));
    double th = r.uniform(0, 1);
    mmhd::State<2> m;
    for (int i = 0; i < L2::kVars; ++i) m[i] = (1 - th) * a[i] + th * b[i];
    double ga = limiter::g_value<2>(a), gb = limiter::g_value<2>(b);
    double tol = 1e-12 * (std::abs(a[L2::kEnergy]) + std::abs(b[L2::kEnergy]));
    ASSERT_GE(limiter::g_value<2>(m), (1 - th) * ga + th * gb - tol);
  }
}

TEST(Limiter, PipelineContracts) {
  verify::Rng r(72);
  int limited = 0;
  for (int k = 0; k < 1000; ++k) {
    C2 c = random_cell(r, 0.5);
    auto mean = c.mean();
    auto th = limiter::scale_limit<2>(c, tables().limiter);
    if (th.density < 1.0 || th.fractions > 0.0 || th.energy < 1.0) ++limited;
    EXPECT_GT(th.density, 0.0);
    EXPECT_LE(th.density, 1.0);
    EXPECT_GE(th.fractions, 0.0);
    EXPECT_LE(th.fractions, 1.0);
    EXPECT_LE(th.energy, 1.0);
    ASSERT_TRUE(limiter::points_admissible<2>(c, tables().limiter));
    auto after = c.mean();
    for (int i = 0; i < L2::kVars; ++i) EXPECT_LE(std::abs(after[i] - mean[i]), 1e-14 * (1 + std::abs(mean[i])));
    C2 again = c;
    limiter::scale_limit<2>(again, tables().limiter);
    EXPECT_EQ(again.c, c.c);
    EXPECT_EQ(again.d, c.d);
  }
  EXPECT_GT(limited, 100);
}

TEST(Limiter, ScalingNeverGrowsModes) {
  verify::Rng r(73);
  for (int k = 0; k < 500; ++k) {
    C2 c = random_cell(r, 0.8);
    C2 orig = c;
    limiter::scale_limit<2>(c, tables().limiter);
    for (int v = 0; v < L2::kVars; ++v) {
      if (v < 1) continue;  // species rows blend toward rho and can move either way
      for (int m = 1; m < dg::kModes; ++m) EXPECT_LE(std::abs(c.c[v][m]), std::abs(orig.c[v][m]) + 1e-300);
    }
    for (int j = 2; j < dg::kMagModes; ++j) EXPECT_LE(std::abs(c.d[j]), std::abs(orig.d[j]));
  }
}
