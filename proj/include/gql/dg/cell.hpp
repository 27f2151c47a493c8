#pragma once

#include <array>
#include <vector>

#include "../mhd.hpp"
#include "basis.hpp"

namespace gql::dg {

// Modal coefficients of one cell. Scalar variables use the Legendre basis;
// (B1, B2) live in the divergence-free basis and their scalar rows stay zero.
template <int NC>
struct Cell {
  using L = mmhd::Layout<NC>;
  static constexpr int kVars = L::kVars;

  std::array<std::array<double, kModes>, kVars> c{};
  std::array<double, kMagModes> d{};

  static constexpr bool is_scalar(int v) { return v != L::kMag && v != L::kMag + 1; }

  mmhd::State<NC> mean() const {
    mmhd::State<NC> u{};
    for (int v = 0; v < kVars; ++v) u[v] = c[v][0];
    u[L::kMag] = d[0];
    u[L::kMag + 1] = d[1];
    return u;
  }

  // Shift non-mean coefficients by blending toward the mean: all modes but
  // the first are scaled by theta.
  void scale_all(double theta) {
    for (int v = 0; v < kVars; ++v)
      if (is_scalar(v))
        for (int m = 1; m < kModes; ++m) c[v][m] *= theta;
    for (int j = 2; j < kMagModes; ++j) d[j] *= theta;
  }
};

// Basis values at a fixed set of reference points.
struct PointTable {
  std::vector<std::array<double, kModes>> phi;
  std::vector<std::array<double, kMagModes>> b1, b2;

  PointTable() = default;
  template <class Points>
  PointTable(const Points& pts, const DivFreeBasis& basis) {
    phi.resize(pts.size());
    b1.resize(pts.size());
    b2.resize(pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p) {
      ScalarBasis::eval(pts[p][0], pts[p][1], phi[p].data());
      basis.eval(pts[p][0], pts[p][1], b1[p].data(), b2[p].data());
    }
  }
  std::size_t size() const { return phi.size(); }
};

template <int NC>
mmhd::State<NC> evaluate(const Cell<NC>& cell, const PointTable& t, std::size_t p) {
  using L = mmhd::Layout<NC>;
  mmhd::State<NC> u{};
  const auto& ph = t.phi[p];
  for (int v = 0; v < L::kVars; ++v) {
    if (!Cell<NC>::is_scalar(v)) continue;
    const auto& c = cell.c[v];
    u[v] = c[0] * ph[0] + c[1] * ph[1] + c[2] * ph[2] + c[3] * ph[3] + c[4] * ph[4] + c[5] * ph[5];
  }
  double s1 = 0.0, s2 = 0.0;
  for (int j = 0; j < kMagModes; ++j) {
    s1 += cell.d[j] * t.b1[p][j];
    s2 += cell.d[j] * t.b2[p][j];
  }
  u[L::kMag] = s1;
  u[L::kMag + 1] = s2;
  return u;
}

// Scalar value of one variable at a point.
template <int NC>
double evaluate_var(const Cell<NC>& cell, const PointTable& t, std::size_t p, int v) {
  using L = mmhd::Layout<NC>;
  if (v == L::kMag || v == L::kMag + 1) {
    const auto& b = v == L::kMag ? t.b1[p] : t.b2[p];
    double s = 0.0;
    for (int j = 0; j < kMagModes; ++j) s += cell.d[j] * b[j];
    return s;
  }
  const auto& ph = t.phi[p];
  const auto& c = cell.c[v];
  return c[0] * ph[0] + c[1] * ph[1] + c[2] * ph[2] + c[3] * ph[3] + c[4] * ph[4] + c[5] * ph[5];
}

// All tables the solver and limiter need for one cell shape.
struct Tables {
  DivFreeBasis basis;
  PointSets points;
  PointTable limiter;
  PointTable volume;
  // Reference-coordinate gradients at volume points.
  std::array<std::array<double, kModes>, PointSets::kVolumePoints> dphi_x{}, dphi_y{};
  std::array<std::array<double, kMagModes>, PointSets::kVolumePoints> db1_x{}, db1_y{}, db2_x{},
      db2_y{};
  // Legendre coefficients of each divergence-free field's components, used
  // by slope limiting: leg1[j][m] = <Psi_j,1, phi_m>.
  std::array<std::array<double, kModes>, kMagModes> leg1{}, leg2{};

  explicit Tables(double aspect = 1.0) : basis(aspect) {
    limiter = PointTable(points.limiter, basis);
    volume = PointTable(points.volume, basis);
    for (int p = 0; p < PointSets::kVolumePoints; ++p) {
      double x = points.volume[p][0], y = points.volume[p][1];
      ScalarBasis::grad(x, y, dphi_x[p].data(), dphi_y[p].data());
      basis.grad(x, y, db1_x[p].data(), db1_y[p].data(), db2_x[p].data(), db2_y[p].data());
      for (int j = 0; j < kMagModes; ++j)
        for (int m = 0; m < kModes; ++m) {
          leg1[j][m] += points.volume_w[p] * volume.b1[p][j] * volume.phi[p][m];
          leg2[j][m] += points.volume_w[p] * volume.b2[p][j] * volume.phi[p][m];
        }
    }
  }
};

}  // namespace gql::dg
