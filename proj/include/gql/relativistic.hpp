#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "core.hpp"
#include "root.hpp"
#include "vec.hpp"

namespace gql::rhd {

// 1D special relativistic hydrodynamics, state (D, m, E).
using State = std::array<double, 3>;

inline constexpr double kDefaultTol = 1e-13;

struct Primitive {
  double rho, v, p;
};

inline State to_conserved(const Primitive& w, double gamma = 5.0 / 3.0) {
  double lorentz2 = 1.0 / (1.0 - w.v * w.v);
  double rhoh = w.rho + gamma / (gamma - 1.0) * w.p;
  return {w.rho * std::sqrt(lorentz2), rhoh * lorentz2 * w.v, rhoh * lorentz2 - w.p};
}

inline double g(const State& u) { return u[2] - std::hypot(u[0], u[1]); }

inline bool admissible(const State& u) { return u[0] > 0.0 && g(u) > 0.0; }

inline std::pair<double, RootSolveReport> pressure(const State& u, double gamma = 5.0 / 3.0,
                                                   double tol = kDefaultTol) {
  const double D = u[0], m = u[1], E = u[2];
  if (!(D > 0.0) || !(g(u) > 0.0)) throw DomainError("rhd: inadmissible state");
  const double m2 = m * m;
  auto f = [&](double p) {
    double w = E + p;
    return m2 / w + D * std::sqrt(1.0 - m2 / (w * w)) + p / (gamma - 1.0) - E;
  };
  auto df = [&](double p) {
    double w = E + p;
    double s = std::sqrt(1.0 - m2 / (w * w));
    return -m2 / (w * w) + D * m2 / (w * w * w * s) + 1.0 / (gamma - 1.0);
  };
  if (m == 0.0) {
    double p = (gamma - 1.0) * (E - D);
    return {p, RootSolveReport{p, 0, std::abs(f(p)), p, p}};
  }
  auto rep = positive_root(f, df, tol, tol * (std::abs(E) + 1.0));
  return {rep.root, rep};
}

inline Primitive to_primitive(const State& u, double gamma = 5.0 / 3.0,
                              double tol = kDefaultTol) {
  double p = pressure(u, gamma, tol).first;
  double w = u[2] + p;
  double v = u[1] / w;
  return {u[0] * std::sqrt(1.0 - v * v), v, p};
}

inline State flux(const State& u, double gamma = 5.0 / 3.0, double tol = kDefaultTol) {
  double p = pressure(u, gamma, tol).first;
  double v = u[1] / (u[2] + p);
  return {u[0] * v, u[1] * v + p, u[1]};
}

inline State as_state(StateView u) { return {u[0], u[1], u[2]}; }

inline InvariantRegion region() {
  return InvariantRegion(3, {{"density", [](StateView u) { return u[0]; }, Strictness::Strict},
                             {"energy_bound", [](StateView u) { return g(as_state(u)); },
                              Strictness::Strict}});
}

// phi(u; v*) = E - m v* - D sqrt(1 - v*^2), v* in (-1, 1).
inline double phi(StateView u, double vs) {
  return u[2] - u[1] * vs - u[0] * std::sqrt(1.0 - vs * vs);
}

inline GqlRepresentation gql() {
  LinearConstraint dens{"density", [](StateView u, ThetaView) { return u[0]; },
                        AuxDomain::none(), Strictness::Strict, {}, MinimizerRole::Exact};
  LinearConstraint c{"energy_bound", [](StateView u, ThetaView th) { return phi(u, th[0]); },
                     AuxDomain::interval(-1.0, 1.0), Strictness::Strict,
                     [](StateView u) -> std::vector<double> {
                       if (!(u[0] > 0.0)) throw DomainError("density");
                       return {u[1] / std::hypot(u[0], u[1])};
                     },
                     MinimizerRole::Exact};
  return GqlRepresentation(3, {dens, c});
}

inline double specific_entropy(const State& u, double gamma = 5.0 / 3.0) {
  Primitive w = to_primitive(u, gamma);
  return w.p / std::pow(w.rho, gamma);
}

inline InvariantRegion entropy_region(double s_min, double gamma = 5.0 / 3.0) {
  if (!(s_min > 0.0)) throw UsageError("entropy bound must be positive");
  return InvariantRegion(
      3, {{"density", [](StateView u) { return u[0]; }, Strictness::Strict},
          {"energy_bound", [](StateView u) { return g(as_state(u)); }, Strictness::Strict},
          {"entropy",
           [s_min, gamma](StateView u) { return specific_entropy(as_state(u), gamma) - s_min; },
           Strictness::NonStrict}});
}

inline State entropy_normal(double rho_s, double v_s, double s_min, double gamma) {
  double k = s_min * gamma * std::pow(rho_s, gamma - 1.0) / (gamma - 1.0);
  return {-std::sqrt(1.0 - v_s * v_s) * (1.0 + k), -v_s, 1.0};
}

inline double entropy_phi(StateView u, double rho_s, double v_s, double s_min, double gamma) {
  State n = entropy_normal(rho_s, v_s, s_min, gamma);
  return u[0] * n[0] + u[1] * n[1] + u[2] * n[2] + s_min * std::pow(rho_s, gamma);
}

// Boundary states with S = S_min, parameterized by (rho*, v*).
inline State entropy_boundary_state(double rho_s, double v_s, double s_min, double gamma) {
  return to_conserved({rho_s, v_s, s_min * std::pow(rho_s, gamma)}, gamma);
}

inline GqlRepresentation entropy_gql(double s_min, double gamma = 5.0 / 3.0) {
  if (!(s_min > 0.0)) throw UsageError("entropy bound must be positive");
  auto base = gql();
  std::vector<LinearConstraint> cs = base.constraints();
  ScaleFn rho_scale = [](StateView u) { return std::max(std::abs(u[0]), 1e-300); };
  cs.push_back({"entropy",
                [s_min, gamma](StateView u, ThetaView th) {
                  return entropy_phi(u, th[0], th[1], s_min, gamma);
                },
                AuxDomain::half_line(rho_scale) * AuxDomain::interval(-1.0, 1.0),
                Strictness::NonStrict,
                {},
                MinimizerRole::Exact});
  return GqlRepresentation(3, std::move(cs));
}

}  // namespace gql::rhd

namespace gql::rmhd {

// 3D special relativistic MHD, state (D, m, B, E).
using State = std::array<double, 8>;

inline constexpr double kDefaultTol = 1e-13;

struct Primitive {
  double rho;
  Vec3 v;
  Vec3 B;
  double p;
};

inline Vec3 mom(const State& u) { return {u[1], u[2], u[3]}; }
inline Vec3 mag(const State& u) { return {u[4], u[5], u[6]}; }

inline State to_conserved(const Primitive& w, double gamma = 5.0 / 3.0) {
  double v2 = norm2(w.v);
  double lorentz2 = 1.0 / (1.0 - v2);
  double rhoh = w.rho + gamma / (gamma - 1.0) * w.p;
  double b2 = norm2(w.B);
  double vb = dot(w.v, w.B);
  double pm = 0.5 * ((1.0 - v2) * b2 + vb * vb);
  double wtot = rhoh * lorentz2 + b2;
  State u{};
  u[0] = w.rho * std::sqrt(lorentz2);
  for (int i = 0; i < 3; ++i) {
    u[1 + i] = wtot * w.v[i] - vb * w.B[i];
    u[4 + i] = w.B[i];
  }
  u[7] = rhoh * lorentz2 - (w.p + pm) + b2;
  return u;
}

inline double g2(const State& u) { return u[7] - std::sqrt(u[0] * u[0] + norm2(mom(u))); }

// 1 / Upsilon^2 = 1 - |v|^2 as a function of phi.
inline double inv_upsilon2(double phi, double m2, double b2, double mb) {
  double s = phi + b2;
  return 1.0 - (phi * phi * m2 + (2.0 * phi + b2) * mb * mb) / (phi * phi * s * s);
}

inline double recovery_function(double phi, const State& u, double gamma) {
  double m2 = norm2(mom(u)), b2 = norm2(mag(u)), mb = dot(mom(u), mag(u));
  double iu2 = inv_upsilon2(phi, m2, b2, mb);
  if (!(iu2 > 0.0)) return -1.0;
  double iu = std::sqrt(iu2);
  return phi - u[7] + b2 - 0.5 * (mb * mb / (phi * phi) + b2 * iu2) +
         (gamma - 1.0) / gamma * (u[0] * iu - phi * iu2);
}

inline std::pair<double, RootSolveReport> phi_hat(const State& u, double gamma = 5.0 / 3.0,
                                                  double tol = kDefaultTol) {
  if (!(u[0] > 0.0)) throw DomainError("rmhd: non-positive density");
  double b2 = norm2(mag(u));
  auto f = [&](double x) { return recovery_function(x, u, gamma); };
  auto df = [&](double x) {
    double h = 1e-7 * x;
    return (f(x + h) - f(x - h)) / (2.0 * h);
  };
  auto rep = positive_root(f, df, tol, tol * (std::abs(u[7]) + b2 + 1.0));
  return {rep.root, rep};
}

inline Primitive to_primitive(const State& u, double gamma = 5.0 / 3.0,
                              double tol = kDefaultTol) {
  double phi = phi_hat(u, gamma, tol).first;
  Vec3 m = mom(u), B = mag(u);
  double m2 = norm2(m), b2 = norm2(B), mb = dot(m, B);
  double iu2 = inv_upsilon2(phi, m2, b2, mb);
  double iu = std::sqrt(iu2);
  Primitive w;
  w.p = (gamma - 1.0) / gamma * iu2 * (phi - u[0] / iu);
  w.rho = u[0] * iu;
  for (int i = 0; i < 3; ++i) w.v[i] = (m[i] + mb * B[i] / phi) / (phi + b2);
  w.B = B;
  return w;
}

inline State as_state(StateView u) {
  State s{};
  for (int i = 0; i < 8; ++i) s[i] = u[i];
  return s;
}

inline InvariantRegion region(double gamma = 5.0 / 3.0) {
  return InvariantRegion(
      8, {{"density", [](StateView u) { return u[0]; }, Strictness::Strict},
          {"pressure",
           [gamma](StateView u) {
             try {
               return to_primitive(as_state(u), gamma).p;
             } catch (const NumericError& e) {
               throw DomainError(e.what());
             }
           },
           Strictness::Strict},
          {"subluminal",
           [gamma](StateView u) {
             try {
               return 1.0 - norm(to_primitive(as_state(u), gamma).v);
             } catch (const NumericError& e) {
               throw DomainError(e.what());
             }
           },
           Strictness::Strict}});
}

// phi(u; v*, B*) = u . n* + p_m*, theta = (v* in the closed unit ball, B*).
inline double phi(StateView u, const Vec3& vs, const Vec3& bs) {
  // Rounding can leave |v*| a hair above 1 on the ball's surface.
  double v2 = std::min(norm2(vs), 1.0);
  double vb = dot(vs, bs);
  double sv = std::sqrt(1.0 - v2);
  double r = -u[0] * sv + u[7];
  for (int i = 0; i < 3; ++i) {
    r -= u[1 + i] * vs[i];
    r -= u[4 + i] * ((1.0 - v2) * bs[i] + vb * vs[i]);
  }
  return r + 0.5 * ((1.0 - v2) * norm2(bs) + vb * vb);
}

// Boundary states (p = 0) parameterized by (rho*, v*, B*).
inline State boundary_state(double rho_s, const Vec3& vs, const Vec3& bs) {
  double v2 = norm2(vs);
  double lorentz = 1.0 / std::sqrt(1.0 - v2);
  double b2 = norm2(bs), vb = dot(vs, bs);
  double pm = 0.5 * ((1.0 - v2) * b2 + vb * vb);
  State u{};
  u[0] = rho_s * lorentz;
  for (int i = 0; i < 3; ++i) {
    u[1 + i] = rho_s * lorentz * lorentz * vs[i] + b2 * vs[i] - vb * bs[i];
    u[4 + i] = bs[i];
  }
  u[7] = rho_s * lorentz * lorentz + b2 - pm;
  return u;
}

inline GqlRepresentation gql() {
  LinearConstraint dens{"density", [](StateView u, ThetaView) { return u[0]; },
                        AuxDomain::none(), Strictness::Strict, {}, MinimizerRole::Exact};
  ScaleFn bscale = [](StateView u) {
    return 1.0 + std::sqrt(u[4] * u[4] + u[5] * u[5] + u[6] * u[6]);
  };
  LinearConstraint c{"energy",
                     [](StateView u, ThetaView th) {
                       return phi(u, {th[0], th[1], th[2]}, {th[3], th[4], th[5]});
                     },
                     AuxDomain::ball(3) * AuxDomain::real_line(3, bscale), Strictness::Strict,
                     [](StateView u) -> std::vector<double> {
                       double s = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3]);
                       if (!(s > 0.0)) throw DomainError("zero state");
                       return {u[1] / s, u[2] / s, u[3] / s, 0.0, 0.0, 0.0};
                     },
                     MinimizerRole::Probe};
  return GqlRepresentation(8, {dens, c});
}

}  // namespace gql::rmhd
