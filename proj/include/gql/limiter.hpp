#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "dg/cell.hpp"
#include "errors.hpp"
#include "mhd.hpp"

// Scaling limiter enforcing admissibility at the limiter point set of a cell.
namespace gql::limiter {

inline constexpr double kFloor = 1e-13;

// Retry factor when rounding leaves a scaled point an ulp short of the floor:
// starts near 1 and doubles its distance from 1 on each try.
inline double backoff(int tries) { return std::max(0.5, 1.0 - 1e-14 * std::ldexp(1.0, tries)); }

struct Thetas {
  double density = 1.0;
  double fractions = 0.0;
  double energy = 1.0;
};

template <int NC>
double min_density(const dg::Cell<NC>& cell, const dg::PointTable& t) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < t.size(); ++p)
    m = std::min(m, dg::evaluate_var<NC>(cell, t, p, mmhd::Layout<NC>::kRho));
  return m;
}

// rho -> rho_bar + theta1 (rho - rho_bar); returns theta1.
template <int NC>
double scale_density(dg::Cell<NC>& cell, const dg::PointTable& t) {
  constexpr int r = mmhd::Layout<NC>::kRho;
  double mean = cell.c[r][0];
  double eps1 = std::min(kFloor, mean);
  if (!(mean > eps1)) throw DomainError("limiter: cell-average density at or below the floor");
  double mn = min_density<NC>(cell, t);
  if (mn >= eps1) return 1.0;
  double theta = (mean - eps1) / (mean - mn);
  auto orig = cell.c[r];
  for (int tries = 0; tries < 96; ++tries) {
    for (int m = 1; m < dg::kModes; ++m) cell.c[r][m] = theta * orig[m];
    if (min_density<NC>(cell, t) >= eps1) return theta;
    theta *= backoff(tries);
  }
  for (int m = 1; m < dg::kModes; ++m) cell.c[r][m] = 0.0;
  return 0.0;
}

// Partial density of species k (k = NC-1 is the complement) at point p.
template <int NC>
double partial_density(const dg::Cell<NC>& cell, const dg::PointTable& t, std::size_t p, int k) {
  constexpr int r = mmhd::Layout<NC>::kRho;
  if (k < NC - 1) return dg::evaluate_var<NC>(cell, t, p, k);
  double rest = dg::evaluate_var<NC>(cell, t, p, r);
  for (int s = 0; s < NC - 1; ++s) rest -= dg::evaluate_var<NC>(cell, t, p, s);
  return rest;
}

template <int NC>
bool fractions_ok(const dg::Cell<NC>& cell, const dg::PointTable& t) {
  for (std::size_t p = 0; p < t.size(); ++p)
    for (int k = 0; k < NC; ++k)
      if (!(partial_density<NC>(cell, t, p, k) >= 0.0)) return false;
  return true;
}

// rho Y_k -> rho Y_k + theta2 ((rhoY_bar_k / rho_bar) rho - rho Y_k); returns theta2.
template <int NC>
double scale_fractions(dg::Cell<NC>& cell, const dg::PointTable& t) {
  if constexpr (NC == 1) {
    return 0.0;
  } else {
    constexpr int r = mmhd::Layout<NC>::kRho;
    double mean = cell.c[r][0];
    std::array<double, NC> ratio{};
    double rest = mean;
    for (int k = 0; k < NC - 1; ++k) {
      ratio[k] = cell.c[k][0] / mean;
      rest -= cell.c[k][0];
    }
    ratio[NC - 1] = rest / mean;
    double theta = 0.0;
    for (std::size_t p = 0; p < t.size(); ++p) {
      double rho = dg::evaluate_var<NC>(cell, t, p, r);
      for (int k = 0; k < NC; ++k) {
        double ry = partial_density<NC>(cell, t, p, k);
        if (ry > 0.0) continue;
        double den = ratio[k] * rho - ry;
        if (den == 0.0) continue;
        theta = std::max(theta, -ry / den);
      }
    }
    if (theta == 0.0 && fractions_ok<NC>(cell, t)) return 0.0;
    auto orig = cell.c;
    auto apply = [&](double th) {
      for (int k = 0; k < NC - 1; ++k)
        for (int m = 1; m < dg::kModes; ++m)
          cell.c[k][m] = (1.0 - th) * orig[k][m] + th * ratio[k] * orig[r][m];
    };
    theta = std::min(theta, 1.0);
    for (int tries = 0; tries < 96; ++tries) {
      apply(theta);
      if (fractions_ok<NC>(cell, t)) return theta;
      theta = 1.0 - (1.0 - theta) * backoff(tries);
      if (1.0 - theta < 1e-15) theta = 1.0;
    }
    apply(1.0);
    return 1.0;
  }
}

template <int NC>
double g_value(const mmhd::State<NC>& u) {
  return mmhd::internal_energy<NC>(u);
}

template <int NC>
double min_g(const dg::Cell<NC>& cell, const dg::PointTable& t) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < t.size(); ++p) m = std::min(m, g_value<NC>(dg::evaluate<NC>(cell, t, p)));
  return m;
}

// U -> U_bar + theta3 (U - U_bar) with g concave; returns theta3.
template <int NC>
double scale_energy(dg::Cell<NC>& cell, const dg::PointTable& t) {
  double gbar = g_value<NC>(cell.mean());
  double eps2 = std::min(kFloor, gbar);
  if (!(gbar > eps2)) throw DomainError("limiter: cell-average internal energy at or below the floor");
  double mn = min_g<NC>(cell, t);
  if (mn >= eps2) return 1.0;
  double theta = (gbar - eps2) / (gbar - mn);
  dg::Cell<NC> orig = cell;
  for (int tries = 0; tries < 96; ++tries) {
    cell = orig;
    cell.scale_all(theta);
    if (min_g<NC>(cell, t) >= eps2 && fractions_ok<NC>(cell, t) &&
        min_density<NC>(cell, t) > 0.0)
      return theta;
    theta *= backoff(tries);
  }
  cell = orig;
  cell.scale_all(0.0);
  return 0.0;
}

// Which stages would leave the cell alone, judged on the same point values the
// stages themselves compute.
struct PointStatus {
  bool density = false;
  bool fractions = false;
  bool energy = false;
};

template <int NC>
PointStatus point_status(const dg::Cell<NC>& cell, const dg::PointTable& t) {
  using L = mmhd::Layout<NC>;
  PointStatus s;
  if (!(cell.c[L::kRho][0] > kFloor) || !(g_value<NC>(cell.mean()) > kFloor)) return s;
  s = {true, true, true};
  for (std::size_t p = 0; p < t.size(); ++p) {
    auto u = dg::evaluate<NC>(cell, t, p);
    double rest = u[L::kRho];
    if (!(rest >= kFloor)) return {};
    for (int k = 0; k < NC - 1; ++k) {
      if (!(u[k] >= 0.0)) s.fractions = false;
      rest -= u[k];
    }
    if (!(rest >= 0.0)) s.fractions = false;
    if (!(g_value<NC>(u) >= kFloor)) s.energy = false;
  }
  return s;
}

// True when no stage of the limiter would modify the cell.
template <int NC>
bool untouched(const dg::Cell<NC>& cell, const dg::PointTable& t) {
  auto s = point_status<NC>(cell, t);
  return s.density && s.fractions && s.energy;
}

template <int NC>
Thetas scale_limit(dg::Cell<NC>& cell, const dg::PointTable& t) {
  Thetas th;
  auto st = point_status<NC>(cell, t);
  if (st.density && st.fractions && st.energy) return th;
  // Mixing only touches the species rows, which neither density nor g reads.
  if (st.density && st.energy) {
    th.fractions = scale_fractions<NC>(cell, t);
    return th;
  }
  th.density = scale_density<NC>(cell, t);
  th.fractions = scale_fractions<NC>(cell, t);
  th.energy = scale_energy<NC>(cell, t);
  return th;
}

// Exact-sign admissibility of every limiter point.
template <int NC>
bool points_admissible(const dg::Cell<NC>& cell, const dg::PointTable& t) {
  for (std::size_t p = 0; p < t.size(); ++p) {
    auto u = dg::evaluate<NC>(cell, t, p);
    if (!mmhd::admissible<NC>(u)) return false;
  }
  return true;
}

}  // namespace gql::limiter
