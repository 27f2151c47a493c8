#pragma once

#include <array>
#include <cmath>

#include "core.hpp"
#include "vec.hpp"

namespace gql::m1 {

// Gray M1 radiative transfer, state (E_r, F_r).
using State = std::array<double, 4>;

inline InvariantRegion region() {
  return InvariantRegion(
      4, {{"flux_limit",
           [](StateView u) { return u[0] - std::sqrt(u[1] * u[1] + u[2] * u[2] + u[3] * u[3]); },
           Strictness::NonStrict}});
}

// phi(u; theta) = E_r - F_r . theta on the unit sphere, minimized at F_r/|F_r|.
inline GqlRepresentation gql() {
  LinearConstraint c{"flux_limit",
                     [](StateView u, ThetaView th) {
                       return u[0] - u[1] * th[0] - u[2] * th[1] - u[3] * th[2];
                     },
                     AuxDomain::sphere(3), Strictness::NonStrict,
                     [](StateView u) -> std::vector<double> {
                       double n = std::sqrt(u[1] * u[1] + u[2] * u[2] + u[3] * u[3]);
                       if (n == 0.0) return {1.0, 0.0, 0.0};
                       return {u[1] / n, u[2] / n, u[3] / n};
                     },
                     MinimizerRole::Exact};
  return GqlRepresentation(4, {c});
}

}  // namespace gql::m1

namespace gql::tenmoment {

// 2D ten-moment Gaussian closure, state (rho, m1, m2, E11, E12, E22).
using State = std::array<double, 6>;

struct Sym2 {
  double a11, a12, a22;
};

inline Sym2 pressure(const State& u) {
  if (!(u[0] > 0.0)) throw DomainError("ten-moment: non-positive density");
  return {2.0 * u[3] - u[1] * u[1] / u[0], 2.0 * u[4] - u[1] * u[2] / u[0],
          2.0 * u[5] - u[2] * u[2] / u[0]};
}

inline double min_eigenvalue(const Sym2& a) {
  double mean = 0.5 * (a.a11 + a.a22);
  double half = 0.5 * (a.a11 - a.a22);
  return mean - std::hypot(half, a.a12);
}

// Unit eigenvector for the smallest eigenvalue.
inline std::array<double, 2> min_eigenvector(const Sym2& a) {
  double lam = min_eigenvalue(a);
  // Take the better conditioned of the two rows of (A - lam I) z = 0.
  double x1 = a.a12, y1 = lam - a.a11;
  double x2 = lam - a.a22, y2 = a.a12;
  double n1 = std::hypot(x1, y1), n2 = std::hypot(x2, y2);
  if (n1 == 0.0 && n2 == 0.0) return {1.0, 0.0};
  if (n1 >= n2) return {x1 / n1, y1 / n1};
  return {x2 / n2, y2 / n2};
}

// E - m (x) m / (2 rho) = p / 2
inline Sym2 reduced_energy(const State& u) {
  Sym2 p = pressure(u);
  return {0.5 * p.a11, 0.5 * p.a12, 0.5 * p.a22};
}

inline State from_primitive(double rho, double v1, double v2, const Sym2& p) {
  return {rho, rho * v1, rho * v2, 0.5 * (p.a11 + rho * v1 * v1), 0.5 * (p.a12 + rho * v1 * v2),
          0.5 * (p.a22 + rho * v2 * v2)};
}

inline State flux(const State& u, int dir) {
  Sym2 p = pressure(u);
  double v1 = u[1] / u[0], v2 = u[2] / u[0];
  double vj = dir == 0 ? v1 : v2;
  double p1j = dir == 0 ? p.a11 : p.a12;
  double p2j = dir == 0 ? p.a12 : p.a22;
  return {u[1 + dir],
          u[1] * vj + p1j,
          u[2] * vj + p2j,
          u[3] * vj + p1j * v1,
          u[4] * vj + 0.5 * (p1j * v2 + p2j * v1),
          u[5] * vj + p2j * v2};
}

inline double wave_speed(const State& u, int dir) {
  Sym2 p = pressure(u);
  double pll = dir == 0 ? p.a11 : p.a22;
  if (!(pll > 0.0)) throw DomainError("ten-moment: non-positive normal pressure");
  return std::abs(u[1 + dir] / u[0]) + std::sqrt(pll / u[0]);
}

inline State as_state(StateView u) { return {u[0], u[1], u[2], u[3], u[4], u[5]}; }

inline InvariantRegion region() {
  return InvariantRegion(
      6, {{"density", [](StateView u) { return u[0]; }, Strictness::Strict},
          {"positive_definite",
           [](StateView u) { return min_eigenvalue(reduced_energy(as_state(u))); },
           Strictness::Strict}});
}

// phi(u; z, v*) = z^T (E - m (x) v* + rho v* (x) v* / 2) z
inline double phi(StateView u, double z1, double z2, double w1, double w2) {
  double zm = z1 * u[1] + z2 * u[2];
  double zw = z1 * w1 + z2 * w2;
  double zez = z1 * z1 * u[3] + 2.0 * z1 * z2 * u[4] + z2 * z2 * u[5];
  return zez - zm * zw + 0.5 * u[0] * zw * zw;
}

// theta = (z on the unit circle, v* in R^2).
inline GqlRepresentation gql() {
  LinearConstraint dens{"density", [](StateView u, ThetaView) { return u[0]; },
                        AuxDomain::none(), Strictness::Strict, {}, MinimizerRole::Exact};
  ScaleFn vscale = [](StateView u) {
    double r = std::abs(u[0]);
    double m = std::hypot(u[1], u[2]);
    return 1.0 + (r > 0.0 ? m / r : m);
  };
  LinearConstraint pd{"positive_definite",
                      [](StateView u, ThetaView th) { return phi(u, th[0], th[1], th[2], th[3]); },
                      AuxDomain::sphere(2) * AuxDomain::real_line(2, vscale), Strictness::Strict,
                      [](StateView u) -> std::vector<double> {
                        State s = as_state(u);
                        auto z = min_eigenvector(reduced_energy(s));
                        return {z[0], z[1], u[1] / u[0], u[2] / u[0]};
                      },
                      MinimizerRole::Exact};
  return GqlRepresentation(6, {dens, pd});
}

}  // namespace gql::tenmoment
